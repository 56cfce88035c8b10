import init, { hullProfile, sampleMixture, knotCurve } from "./pkg/hararms_demo.js";

const PAD = 36;

// Maps data ranges onto a canvas and draws axes with end labels.
function frame(canvas, xs, ys) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const finite = (v) => v.filter(Number.isFinite);
  const [x0, x1] = [Math.min(...finite(xs)), Math.max(...finite(xs))];
  const [y0, y1] = [Math.min(...finite(ys)), Math.max(...finite(ys))];
  const w = canvas.width - 2 * PAD;
  const h = canvas.height - 2 * PAD;
  const sx = (x) => PAD + ((x - x0) / (x1 - x0 || 1)) * w;
  const sy = (y) => canvas.height - PAD - ((y - y0) / (y1 - y0 || 1)) * h;
  ctx.strokeStyle = "#999";
  ctx.strokeRect(PAD, PAD, w, h);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(x0.toPrecision(3), PAD, canvas.height - PAD + 14);
  ctx.fillText(x1.toPrecision(3), PAD + w - 24, canvas.height - PAD + 14);
  ctx.fillText(y1.toPrecision(4), 2, PAD + 4);
  ctx.fillText(y0.toPrecision(4), 2, canvas.height - PAD);
  return { ctx, sx, sy };
}

function line(f, xs, ys, colour) {
  f.ctx.strokeStyle = colour;
  f.ctx.beginPath();
  let started = false;
  xs.forEach((x, i) => {
    if (!Number.isFinite(ys[i])) return;
    if (started) f.ctx.lineTo(f.sx(x), f.sy(ys[i]));
    else f.ctx.moveTo(f.sx(x), f.sy(ys[i]));
    started = true;
  });
  f.ctx.stroke();
}

function dots(f, xs, ys, colour, r = 1.5) {
  f.ctx.fillStyle = colour;
  xs.forEach((x, i) => f.ctx.fillRect(f.sx(x) - r / 2, f.sy(ys[i]) - r / 2, r, r));
}

function wire(id, run) {
  const section = document.getElementById(id);
  const out = section.querySelector(".out");
  const value = (name) => section.querySelector(`[name=${name}]`).value;
  section.querySelector("button").addEventListener("click", () => {
    out.classList.remove("err");
    try {
      const t0 = performance.now();
      const text = run(value);
      out.textContent = `${text}\n${(performance.now() - t0).toFixed(0)} ms`;
    } catch (e) {
      out.classList.add("err");
      out.textContent = String(e.message ?? e);
    }
  });
}

function runHull(value) {
  const p = JSON.parse(
    hullProfile(value("family"), value("hull"), Number(value("points")), Number(value("draws")), 1),
  );
  const xs = p.curve.map((c) => c[0]);
  const logf = p.curve.map((c) => c[1]);
  const hull = p.curve.map((c) => c[2]);
  // Keep the view near the mode so the hull is readable.
  const top = Math.max(...logf, ...hull);
  const clip = (v) => (v < top - 25 ? NaN : v);
  const f = frame(document.getElementById("hull-log"), xs, [...logf.map(clip), ...hull.map(clip)]);
  line(f, xs, logf.map(clip), "#1f5fa8");
  line(f, xs, hull.map(clip), "#c2410c");
  dots(f, p.points, p.log_values, "#000", 5);

  const centres = p.histogram.map((b) => b[0]);
  const g = frame(document.getElementById("hull-hist"), centres, [0, ...p.histogram.flatMap((b) => [b[1], b[2]])]);
  const bw = g.sx(centres[1]) - g.sx(centres[0]);
  g.ctx.fillStyle = "#cbd5e1";
  p.histogram.forEach(([c, d]) => g.ctx.fillRect(g.sx(c) - bw / 2, g.sy(d), bw - 1, g.sy(0) - g.sy(d)));
  line(g, centres, p.histogram.map((b) => b[2]), "#c2410c");
  return `${p.segments.length} segments, hull ${p.covers_target ? "covers" : "does not cover"} the target`;
}

function runMixture(value) {
  const r = JSON.parse(sampleMixture(value("sampler"), Number(value("iterations")), Number(value("seed"))));
  const f = frame(document.getElementById("mixture-plot"), [-10, 18], [-10, 18]);
  dots(f, r.samples.map((s) => s[0]), r.samples.map((s) => s[1]), "rgba(31,95,168,0.35)", 2);
  dots(f, r.means.map((m) => m[0]), r.means.map((m) => m[1]), "#c2410c", 7);
  const share = r.occupancy.map((w, i) => `(${r.means[i].join(", ")}): ${(100 * w).toFixed(1)}%`).join("\n");
  return `${r.samples.length} draws, acceptance ${r.acceptance_rate.toFixed(3)}\n${share}`;
}

function runKnots(value) {
  const c = JSON.parse(knotCurve(Number(value("dataset")), Number(value("seed")), Number(value("step"))));
  const knots = c.curve.map((p) => p[0]);
  const ll = c.curve.map((p) => p[1]);
  const f = frame(document.getElementById("knot-curve"), knots, ll);
  line(f, knots, ll, "#1f5fa8");
  dots(f, [c.best_knot], [c.best_log_likelihood], "#c2410c", 7);

  const g = frame(document.getElementById("knot-fit"), c.x, [...c.y, ...c.fitted]);
  dots(g, c.x, c.y, "rgba(100,100,100,0.4)", 2);
  line(g, c.x, c.truth, "#15803d");
  line(g, c.x, c.fitted, "#c2410c");
  return `best knot ${c.best_knot}, log-likelihood ${c.best_log_likelihood.toFixed(2)}`;
}

await init();
wire("hull", runHull);
wire("mixture", runMixture);
wire("knots", runKnots);
