import init, { conjugateCurve, boundCurve, tailCurve } from "./pkg/lilbound_demo.js";

const PAD = 48;

// Draws polylines [{xs, ys, color, dash}] with shared axes; log10 y when asked.
function plot(canvas, series, { logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height;
  ctx.clearRect(0, 0, w, h);
  const tf = (y) => (logY ? Math.log10(y) : y);
  const pts = series.flatMap((s) => s.xs.map((x, i) => [x, s.ys[i]]))
    .filter(([, y]) => y !== null && Number.isFinite(y) && (!logY || y > 0));
  if (pts.length === 0) return;
  const xmin = Math.min(...pts.map((p) => p[0])), xmax = Math.max(...pts.map((p) => p[0]));
  let ymin = Math.min(...pts.map((p) => tf(p[1]))), ymax = Math.max(...pts.map((p) => tf(p[1])));
  if (ymax === ymin) ymax = ymin + 1;
  const sx = (x) => PAD + ((x - xmin) / (xmax - xmin || 1)) * (w - 2 * PAD);
  const sy = (y) => h - PAD + ((ymin - tf(y)) / (ymax - ymin)) * (h - 2 * PAD);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.beginPath();
  ctx.moveTo(PAD, PAD / 2); ctx.lineTo(PAD, h - PAD); ctx.lineTo(w - PAD / 2, h - PAD);
  ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const x = xmin + ((xmax - xmin) * i) / 4;
    ctx.fillText(x.toPrecision(3), sx(x) - 10, h - PAD + 16);
    const y = ymin + ((ymax - ymin) * i) / 4;
    const label = logY ? "1e" + y.toFixed(1) : y.toPrecision(3);
    ctx.fillText(label, 2, h - PAD - ((h - 2 * PAD) * i) / 4 + 4);
  }
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dash || []);
    ctx.beginPath();
    let pen = false;
    s.xs.forEach((x, i) => {
      const y = s.ys[i];
      if (y === null || !Number.isFinite(y) || (logY && y <= 0)) { pen = false; return; }
      if (pen) ctx.lineTo(sx(x), sy(y)); else ctx.moveTo(sx(x), sy(y));
      pen = true;
    });
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function wire(id, action) {
  const root = document.getElementById(id);
  const field = (name) => root.querySelector(`[name=${name}]`).value;
  const err = root.querySelector(".err");
  const run = () => {
    err.textContent = "";
    try {
      action(field, root.querySelector("canvas"));
    } catch (e) {
      err.textContent = String(e);
    }
  };
  root.querySelector("button").addEventListener("click", run);
  run();
}

await init();

wire("conj", (field, canvas) => {
  const c = JSON.parse(conjugateCurve(field("phi"), Number(field("umax")), 200));
  plot(canvas, [{ xs: c.u, ys: c.phi_star, color: "#1f5fa8" }]);
});

wire("bound", (field, canvas) => {
  const b = JSON.parse(boundCurve(field("model"), field("norming"), Number(field("c")), 1, 10, 40));
  plot(canvas, [{ xs: b.u, ys: b.bound, color: "#a8321f" }], { logY: true });
});

wire("tail", (field, canvas) => {
  const t = JSON.parse(tailCurve(field("model"), "lil:r=2", Number(field("horizon")),
    Number(field("paths")), Number(field("seed")), 0.5, 4, 36));
  plot(canvas, [
    { xs: t.u, ys: t.w_hat, color: "#1f7a3a" },
    { xs: t.u, ys: t.ci_low, color: "#1f7a3a", dash: [4, 4] },
    { xs: t.u, ys: t.ci_high, color: "#1f7a3a", dash: [4, 4] },
  ], { logY: true });
});
