use crate::error::{invalid, Error, Result};
use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

#[derive(Debug, Clone)]
pub struct EigenModes {
    /// Squared frequencies, ascending (signed for indefinite `K`).
    pub omega2: Vec<f64>,
    /// Frequencies `sign(ω²)·√|ω²|`.
    pub omega: Vec<f64>,
    /// M-orthonormal real modes for the non-rotating problem.
    pub vectors: Option<DMatrix<f64>>,
    /// Complex modes of the gyroscopic problem.
    pub complex_vectors: Option<DMatrix<Complex<f64>>>,
}

fn symmetric_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    0.5 * (a + a.transpose())
}

/// `K x = ω² M x` when `C = 0`, otherwise `(−ω²M + iωC + K)x = 0`.
/// Returns the `count` lowest modes.
pub fn eigenmodes(m: &DMatrix<f64>, c: &DMatrix<f64>, k: &DMatrix<f64>, count: usize) -> Result<EigenModes> {
    let n = m.nrows();
    if m.ncols() != n || k.shape() != (n, n) || c.shape() != (n, n) {
        return Err(invalid("matrix shapes disagree"));
    }
    let l = m.clone().cholesky().ok_or_else(|| Error::Singular("singular matrix".into()))?.l();
    let li = l.clone().try_inverse().ok_or_else(|| Error::Singular("singular matrix".into()))?;
    let kt = symmetric_part(&(&li * k * li.transpose()));
    let count = count.min(n);
    if c.amax() == 0.0 {
        let eig = SymmetricEigen::try_new(kt, 1e-15, 10_000).ok_or_else(|| Error::NonConvergence("symmetric eigensolver".into()))?;
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        idx.truncate(count);
        let omega2: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vecs = DMatrix::zeros(n, count);
        for (col, &i) in idx.iter().enumerate() {
            vecs.set_column(col, &(li.transpose() * eig.eigenvectors.column(i)));
        }
        let omega = omega2.iter().map(|w| w.signum() * w.abs().sqrt()).collect();
        return Ok(EigenModes { omega2, omega, vectors: Some(vecs), complex_vectors: None });
    }
    let ct = &li * c * li.transpose();
    let keig = SymmetricEigen::try_new(kt.clone(), 1e-15, 10_000).ok_or_else(|| Error::NonConvergence("symmetric eigensolver".into()))?;
    let kmin = keig.eigenvalues.min();
    if kmin < -1e-10 * keig.eigenvalues.amax().max(1.0) {
        // indefinite stiffness: eigenvalues of the first-order pencil only
        let mut a = DMatrix::zeros(2 * n, 2 * n);
        a.view_mut((0, n), (n, n)).fill_with_identity();
        a.view_mut((n, 0), (n, n)).copy_from(&(-&kt));
        a.view_mut((n, n), (n, n)).copy_from(&(-&ct));
        let lam = a.complex_eigenvalues();
        // λ = iω
        let mut w: Vec<f64> = lam.iter().filter(|l| l.im >= 0.0).map(|l| l.im).collect();
        w.sort_by(f64::total_cmp);
        w.truncate(count);
        return Ok(EigenModes { omega2: w.iter().map(|v| v * v).collect(), omega: w, vectors: None, complex_vectors: None });
    }
    // y = Lᵀx, w = S y with S² = K̃, v = ẏ: d/dt(w, v) = [[0, S], [−S, −C̃]](w, v)
    // is skew; i times it is Hermitian with eigenvalues −ω.
    let s = &keig.eigenvectors
        * DMatrix::from_diagonal(&keig.eigenvalues.map(|v| v.max(0.0).sqrt()))
        * keig.eigenvectors.transpose();
    let mut h = DMatrix::<Complex<f64>>::zeros(2 * n, 2 * n);
    let i = Complex::new(0.0, 1.0);
    for r in 0..n {
        for col in 0..n {
            h[(r, n + col)] = i * s[(r, col)];
            h[(n + r, col)] = -i * s[(r, col)];
            h[(n + r, n + col)] = -i * ct[(r, col)];
        }
    }
    let eig = SymmetricEigen::try_new(h, 1e-15, 10_000).ok_or_else(|| Error::NonConvergence("hermitian eigensolver".into()))?;
    let mut idx: Vec<usize> = (0..2 * n).filter(|&j| -eig.eigenvalues[j] >= 0.0).collect();
    idx.sort_by(|&a, &b| (-eig.eigenvalues[a]).total_cmp(&(-eig.eigenvalues[b])));
    idx.truncate(count);
    let omega: Vec<f64> = idx.iter().map(|&j| -eig.eigenvalues[j]).collect();
    let lti = li.transpose().map(|v| Complex::new(v, 0.0));
    let mut vecs = DMatrix::zeros(n, idx.len());
    for (col, &j) in idx.iter().enumerate() {
        let z = eig.eigenvectors.column(j);
        let w = omega[col];
        // v = iω y away from zero frequency; the w block otherwise
        let y: DVector<Complex<f64>> = if w.abs() > 1e-12 {
            z.rows(n, n).map(|v| v / (i * w))
        } else {
            z.rows(0, n).into_owned()
        };
        let mut x = &lti * y;
        let nrm = x.norm();
        if nrm > 0.0 {
            x /= Complex::new(nrm, 0.0);
        }
        vecs.set_column(col, &x);
    }
    Ok(EigenModes { omega2: omega.iter().map(|v| v * v).collect(), omega, vectors: None, complex_vectors: Some(vecs) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize, seed: f64) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) as f64 * seed).sin());
        &a * a.transpose() + DMatrix::identity(n, n) * n as f64
    }

    #[test]
    fn stiffness_equal_to_mass_gives_unit_frequencies() {
        let m = spd(6, 0.37);
        let r = eigenmodes(&m, &DMatrix::zeros(6, 6), &m, 6).unwrap();
        assert!(r.omega.iter().all(|w| (w - 1.0).abs() < 1e-12));
        let v = r.vectors.unwrap();
        let g = v.transpose() * &m * &v;
        assert!((g - DMatrix::identity(6, 6)).amax() < 1e-12);
    }

    #[test]
    fn gyroscopic_modes_satisfy_the_pencil() {
        let n = 5;
        let m = spd(n, 0.21);
        let k = spd(n, 0.53);
        let a = DMatrix::from_fn(n, n, |i, j| ((i + 2 * j) as f64).cos());
        let c = 0.3 * (&a - a.transpose());
        let r = eigenmodes(&m, &c, &k, n).unwrap();
        let x = r.complex_vectors.unwrap();
        let i = Complex::new(0.0, 1.0);
        for (col, &w) in r.omega.iter().enumerate() {
            let pencil = m.map(|v| Complex::new(-w * w * v, 0.0)) + c.map(|v| i * w * v) + k.map(|v| Complex::new(v, 0.0));
            let res = pencil * x.column(col);
            assert!(res.norm() < 1e-9, "{}", res.norm());
        }
        // pencil eigenvalues from the first-order form agree
        let mut w: Vec<f64> = r.omega.clone();
        w.sort_by(f64::total_cmp);
        assert!(w[0] > 0.0);
    }
}
