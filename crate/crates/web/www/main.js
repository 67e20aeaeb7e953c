import init, { friction_curves, slider_trajectory, radial_profiles } from "./pkg/stratovar_web.js";

const COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c"];
const num = (id) => parseFloat(document.getElementById(id).value);
const list = (id) => document.getElementById(id).value.split(",").map((s) => parseFloat(s));

// table is row-major with `width` columns
function column(table, width, c) {
  const out = [];
  for (let i = c; i < table.length; i += width) out.push(table[i]);
  return out;
}

function plot(canvas, x, series) {
  const ctx = canvas.getContext("2d");
  const { width, height } = canvas;
  const pad = 30;
  ctx.clearRect(0, 0, width, height);
  const finite = (v) => v.filter(Number.isFinite);
  const xs = finite(x);
  const ys = series.flatMap(finite);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 === y0) { y0 -= 1; y1 += 1; }
  const px = (v) => pad + ((v - x0) / (x1 - x0 || 1)) * (width - 2 * pad);
  const py = (v) => height - pad - ((v - y0) / (y1 - y0)) * (height - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, width - 2 * pad, height - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.fillText(y1.toPrecision(4), 2, pad - 4);
  ctx.fillText(y0.toPrecision(4), 2, height - pad + 14);
  ctx.fillText(x0.toPrecision(3), pad, height - 8);
  ctx.fillText(x1.toPrecision(3), width - pad - 30, height - 8);
  series.forEach((y, s) => {
    ctx.strokeStyle = COLORS[s % COLORS.length];
    ctx.beginPath();
    let started = false;
    for (let i = 0; i < x.length; i++) {
      if (!Number.isFinite(y[i])) continue;
      if (started) ctx.lineTo(px(x[i]), py(y[i]));
      else ctx.moveTo(px(x[i]), py(y[i]));
      started = true;
    }
    ctx.stroke();
  });
}

function guarded(msgId, f) {
  return () => {
    const msg = document.getElementById(msgId);
    msg.textContent = "";
    try {
      f();
    } catch (e) {
      msg.textContent = String(e.message ?? e);
    }
  };
}

function friction() {
  const t = friction_curves(num("f-f0"), num("f-a"), num("f-b"), num("f-v0"), 1e-6, 1e6, 200);
  const v = column(t, 3, 0).map(Math.log10);
  plot(document.getElementById("f-plot"), v, [column(t, 3, 1), column(t, 3, 2)]);
}

function slider() {
  const t = slider_trajectory(num("s-k"), num("s-a"), num("s-b"), num("s-lc"), num("s-sn"), 1.0, 1e-3, 3000, 0.002);
  const growth = t[t.length - 1];
  const rows = t.subarray(0, t.length - 1);
  const v = column(rows, 4, 1).map((x) => Math.log10(x));
  plot(document.getElementById("s-plot"), column(rows, 4, 0), [v]);
  const kc = (num("s-sn") * (num("s-b") - num("s-a"))) / num("s-lc");
  document.getElementById("s-verdict").textContent =
    `${growth < 0 ? "stable" : "unstable"} (k_crit = ${kc.toPrecision(3)})`;
}

function gravity() {
  const t = radial_profiles(new Float64Array(list("g-r")), new Float64Array(list("g-rho")), num("g-g"), 101);
  const scaled = (c) => {
    const v = column(t, 5, c);
    const m = Math.max(...v.map(Math.abs)) || 1;
    return v.map((x) => x / m);
  };
  plot(document.getElementById("g-plot"), column(t, 5, 0), [scaled(2), scaled(3), scaled(4)]);
}

await init();
for (const [id, msg, f] of [["f-run", "f-msg", friction], ["s-run", "s-msg", slider], ["g-run", "g-msg", gravity]]) {
  const run = guarded(msg, f);
  document.getElementById(id).addEventListener("click", run);
  run();
}
