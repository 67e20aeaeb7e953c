//! Rate-and-state friction, the spring-slider and frictional faults in the
//! discretized elastic system.

mod fault;
mod friction;
mod slider;

pub use fault::{dissipation_rate, FaultNode, FaultRun, FaultSystem, StepReport};
pub use friction::{
    collinearity_residual, friction_coefficient, friction_regularized, friction_regularized_slope, state_rate, steady_state,
    strength, traction_vector, FaultPointState, FrictionLaw, NormalCoupling, StateLaw, SteadyState,
};
pub use slider::{slip_rate_for_traction, RUNAWAY_RATIO, spring_slider_run, SliderTrajectory, SpringSlider};
