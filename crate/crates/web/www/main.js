import init, { DemoSession } from "./pkg/coxstab_web.js";

const $ = (id) => document.getElementById(id);
const GROUP_COLORS = ["#c62828", "#2e7d32", "#1565c0", "#8e6c00", "#6a1b9a", "#00838f"];
const NOISE_COLOR = "#9e9e9e";

let session = null;
let dataset = null;

function status(msg) {
  $("status").textContent = msg || "";
}

function alpha() {
  return Math.pow(10, +$("alpha").value);
}

function beta() {
  return $("betaZero").checked ? 0 : Math.pow(10, +$("beta").value);
}

function colorOf(f) {
  return f.group === null ? NOISE_COLOR : GROUP_COLORS[f.group % GROUP_COLORS.length];
}

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "11px system-ui, sans-serif";
  return ctx;
}

function axes(ctx, box, xLabel, yLabel, yMin, yMax) {
  ctx.strokeStyle = "#444";
  ctx.beginPath();
  ctx.moveTo(box.x0, box.y0);
  ctx.lineTo(box.x0, box.y1);
  ctx.lineTo(box.x1, box.y1);
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.fillText(yLabel, 4, box.y0 - 6);
  ctx.fillText(xLabel, box.x1 - ctx.measureText(xLabel).width, box.y1 + 28);
  ctx.fillText(yMax.toFixed(2), 4, box.y0 + 4);
  ctx.fillText(yMin.toFixed(2), 4, box.y1);
}

function drawWeights(fit) {
  const canvas = $("weights");
  const ctx = clear(canvas);
  const box = { x0: 44, x1: canvas.width - 10, y0: 16, y1: canvas.height - 30 };
  const p = fit.weights.length;
  const truth = dataset.features.map((f) => f.true_weight);
  const lim = Math.max(0.1, ...fit.weights.map(Math.abs), ...truth.map(Math.abs)) * 1.1;
  const y = (v) => box.y0 + ((lim - v) / (2 * lim)) * (box.y1 - box.y0);
  const bw = (box.x1 - box.x0) / p;
  axes(ctx, box, "feature", "weight", -lim, lim);
  ctx.strokeStyle = "#bbb";
  ctx.beginPath();
  ctx.moveTo(box.x0, y(0));
  ctx.lineTo(box.x1, y(0));
  ctx.stroke();
  fit.weights.forEach((w, i) => {
    const f = dataset.features[i];
    ctx.fillStyle = colorOf(f);
    const top = Math.min(y(w), y(0));
    ctx.fillRect(box.x0 + i * bw + 1, top, Math.max(1, bw - 2), Math.abs(y(w) - y(0)));
    ctx.strokeStyle = "#000";
    ctx.beginPath();
    ctx.moveTo(box.x0 + i * bw + 1, y(f.true_weight));
    ctx.lineTo(box.x0 + (i + 1) * bw - 1, y(f.true_weight));
    ctx.stroke();
  });
  $("fitinfo").textContent =
    `${fit.nonzero} of ${p} nonzero · ${fit.n_iter} iterations` + (fit.converged ? "" : " (not converged)");
}

function drawPath(path) {
  const canvas = $("path");
  const ctx = clear(canvas);
  const box = { x0: 44, x1: canvas.width - 10, y0: 16, y1: canvas.height - 30 };
  const lim = Math.max(0.1, ...path.weights.flat().map(Math.abs)) * 1.05;
  const la = path.alphas.map(Math.log10);
  const [lmax, lmin] = [la[0], la[la.length - 1]];
  const x = (l) => box.x0 + ((lmax - l) / (lmax - lmin)) * (box.x1 - box.x0);
  const y = (v) => box.y0 + ((lim - v) / (2 * lim)) * (box.y1 - box.y0);
  axes(ctx, box, "log₁₀ α (decreasing →)", "weight", -lim, lim);
  dataset.features.forEach((f, j) => {
    ctx.strokeStyle = colorOf(f);
    ctx.lineWidth = f.group === null ? 0.7 : 1.5;
    ctx.beginPath();
    path.weights.forEach((w, i) => (i ? ctx.lineTo(x(la[i]), y(w[j])) : ctx.moveTo(x(la[i]), y(w[j]))));
    ctx.stroke();
  });
  ctx.lineWidth = 1;
  ctx.fillStyle = "#444";
  path.alphas.forEach((a, i) => {
    if (i % 3 === 0) ctx.fillText(`${path.nonzero[i]}`, x(la[i]) - 4, box.y0 + 10);
  });
  ctx.fillText("nonzero:", box.x0 + 4, box.y0 - 4);
}

function drawStability(v) {
  const canvas = $("stability");
  const ctx = clear(canvas);
  const key = $("index").value;
  const box = { x0: 44, x1: canvas.width - 10, y0: 16, y1: canvas.height - 30 };
  const all = v.lasso.concat(v.graph).map((pt) => pt[key]);
  const lo = Math.min(0, ...all);
  const kmax = v.lasso[v.lasso.length - 1].k;
  const x = (k) => box.x0 + ((k - 1) / (kmax - 1)) * (box.x1 - box.x0);
  const y = (val) => box.y0 + ((1 - val) / (1 - lo)) * (box.y1 - box.y0);
  axes(ctx, box, "k (top-k features)", key === "mean_jaccard" ? "Jaccard" : "consistency", lo, 1);
  [[v.lasso, "#999"], [v.graph, "#1565c0"]].forEach(([curve, color]) => {
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    curve.forEach((pt, i) => (i ? ctx.lineTo(x(pt.k), y(pt[key])) : ctx.moveTo(x(pt.k), y(pt[key]))));
    ctx.stroke();
  });
  ctx.lineWidth = 1;
}

function legend() {
  const parts = GROUP_COLORS.map(
    (c, g) => `<span><i class="sw" style="background:${c}"></i>group ${g}</span>`
  );
  parts.push(`<span><i class="sw" style="background:${NOISE_COLOR}"></i>noise</span>`);
  parts.push(`<span><i class="sw" style="background:#000;height:2px;vertical-align:.25em"></i>true weight</span>`);
  $("weightsLegend").innerHTML = parts.join("");
}

function run(label, fn) {
  status(label);
  // let the status paint before the synchronous wasm call
  return new Promise((resolve) =>
    setTimeout(() => {
      try {
        resolve(fn());
        status("");
      } catch (e) {
        status(String(e));
        resolve(null);
      }
    }, 10)
  );
}

function refit() {
  $("alphaOut").textContent = alpha().toPrecision(2);
  $("betaOut").textContent = beta() === 0 ? "0" : beta().toPrecision(2);
  if (!session) return;
  try {
    drawWeights(JSON.parse(session.fit(alpha(), beta())));
  } catch (e) {
    status(String(e));
  }
}

async function regenerate() {
  await run("Generating…", () => {
    if (session) session.free();
    session = new DemoSession(+$("n").value, +$("rho").value, +$("seed").value >>> 0);
    dataset = JSON.parse(session.dataset());
    $("datainfo").textContent =
      `p = ${dataset.p}, ${dataset.events} events, ${(100 * dataset.censored_fraction).toFixed(1)}% censored, ${dataset.edges} graph edges`;
  });
  refit();
}

async function main() {
  await init();
  legend();
  $("alpha").addEventListener("input", refit);
  $("beta").addEventListener("input", refit);
  $("betaZero").addEventListener("change", refit);
  $("regen").addEventListener("click", regenerate);
  $("runPath").addEventListener("click", async () => {
    const path = await run("Computing path…", () => JSON.parse(session.path(beta(), 0.001, 0.3, 30)));
    if (path) drawPath(path);
  });
  let lastStability = null;
  $("runStab").addEventListener("click", async () => {
    const reps = +$("reps").value;
    const t0 = performance.now();
    const v = await run(`Fitting ${2 * reps} bootstrap models…`, () =>
      JSON.parse(session.stability(alpha(), beta(), reps, 2014))
    );
    if (v) {
      lastStability = v;
      drawStability(v);
      $("stabinfo").textContent = `${((performance.now() - t0) / 1000).toFixed(1)} s`;
    }
  });
  $("index").addEventListener("change", () => lastStability && drawStability(lastStability));
  await regenerate();
}

main().catch((e) => status(`Failed to load: ${e}`));
