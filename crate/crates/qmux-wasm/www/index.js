// Static demo page logic. Expects the wasm-bindgen output in ./pkg
// (see the repository README for the two build commands).

import init, {
  fidelity_curves,
  purification_ratio_curves,
  waiting_time_pmf,
  waiting_time_mean,
} from "./pkg/qmux_wasm.js";

const COLORS = ["#0b61a4", "#d03a2b", "#2a8a3c", "#8a56c4"];

function extract(curveSet) {
  // Copy everything out of wasm memory, then free the handle.
  const xs = Array.from(curveSet.xs());
  const series = [];
  for (let i = 0; i < curveSet.series_count(); i++) {
    series.push({ label: curveSet.label(i), ys: Array.from(curveSet.series(i)) });
  }
  curveSet.free();
  return { xs, series };
}

function drawAxes(ctx, w, h, pad, xMin, xMax, yMin, yMax, xLabel, yLabel) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.lineWidth = 1;
  ctx.font = "12px system-ui";
  ctx.strokeRect(pad, pad / 2, w - 1.5 * pad, h - 1.5 * pad);
  const ticks = 5;
  for (let t = 0; t <= ticks; t++) {
    const fx = xMin + ((xMax - xMin) * t) / ticks;
    const px = pad + ((w - 1.5 * pad) * t) / ticks;
    ctx.fillText(fx.toPrecision(3), px - 8, h - pad / 2 + 16);
    const fy = yMin + ((yMax - yMin) * t) / ticks;
    const py = h - pad + ((pad / 2 - (h - pad)) * t) / ticks;
    ctx.fillText(fy.toPrecision(3), 4, py + 4);
  }
  ctx.fillText(xLabel, w / 2, h - 4);
  ctx.save();
  ctx.translate(12, h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(yLabel, 0, 0);
  ctx.restore();
}

function plotLines(canvas, data, xLabel, yLabel, opts = {}) {
  const ctx = canvas.getContext("2d");
  const { xs, series } = data;
  const pad = 48;
  const w = canvas.width, h = canvas.height;
  const finite = series.flatMap(s => s.ys).filter(Number.isFinite);
  const xMin = Math.min(...xs), xMax = Math.max(...xs);
  let yMin = opts.yMin ?? Math.min(...finite);
  let yMax = opts.yMax ?? Math.max(...finite);
  if (yMax === yMin) { yMax += 1; yMin -= 1; }
  const sx = x => pad + ((x - xMin) / (xMax - xMin)) * (w - 1.5 * pad);
  const sy = y => (h - pad) - ((y - yMin) / (yMax - yMin)) * (h - 1.5 * pad);
  drawAxes(ctx, w, h, pad, xMin, xMax, yMin, yMax, xLabel, yLabel);

  if (opts.hline !== undefined && opts.hline >= yMin && opts.hline <= yMax) {
    ctx.strokeStyle = "#999";
    ctx.setLineDash([6, 4]);
    ctx.beginPath();
    ctx.moveTo(sx(xMin), sy(opts.hline));
    ctx.lineTo(sx(xMax), sy(opts.hline));
    ctx.stroke();
    ctx.setLineDash([]);
  }
  series.forEach((s, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    ctx.lineWidth = 2;
    ctx.beginPath();
    let started = false;
    s.ys.forEach((y, j) => {
      if (!Number.isFinite(y)) { started = false; return; }
      const px = sx(xs[j]), py = sy(y);
      if (started) ctx.lineTo(px, py); else { ctx.moveTo(px, py); started = true; }
    });
    ctx.stroke();
  });
}

function plotBars(canvas, data, xLabel, yLabel) {
  const ctx = canvas.getContext("2d");
  const { xs, series } = data;
  const ys = series[0].ys;
  const pad = 48;
  const w = canvas.width, h = canvas.height;
  const xMin = 0.5, xMax = Math.max(...xs) + 0.5;
  const yMax = Math.max(...ys) * 1.08 || 1;
  drawAxes(ctx, w, h, pad, xMin, xMax, 0, yMax, xLabel, yLabel);
  const sx = x => pad + ((x - xMin) / (xMax - xMin)) * (w - 1.5 * pad);
  const sy = y => (h - pad) - (y / yMax) * (h - 1.5 * pad);
  const barW = Math.max(1, (sx(1.5) - sx(0.5)) * 0.8);
  ctx.fillStyle = COLORS[0];
  ys.forEach((y, j) => {
    const px = sx(xs[j]);
    ctx.fillRect(px - barW / 2, sy(y), barW, (h - pad) - sy(y));
  });
}

function legend(el, series) {
  el.innerHTML = series
    .map((s, i) => `<span class="swatch" style="background:${COLORS[i % COLORS.length]}"></span>${s.label}`)
    .join("&nbsp;&nbsp;&nbsp;");
}

function hookRange(id, outId, fmt, onChange) {
  const input = document.getElementById(id);
  const out = document.getElementById(outId);
  const update = () => {
    out.textContent = fmt(parseFloat(input.value));
    onChange();
  };
  input.addEventListener("input", update);
  return () => parseFloat(input.value);
}

async function main() {
  await init();

  // view 1: fidelity vs distance
  const fidCanvas = document.getElementById("fid-canvas");
  const redrawFid = () => {
    const t2 = parseFloat(document.getElementById("fid-t2").value);
    const latt = parseFloat(document.getElementById("fid-latt").value);
    const lmax = parseFloat(document.getElementById("fid-lmax").value);
    const data = extract(fidelity_curves(lmax, t2, latt, 141));
    legend(document.getElementById("fid-legend"), data.series);
    plotLines(fidCanvas, data, "L (km)", "fidelity", { yMin: 0.5, yMax: 1.0 });
  };
  hookRange("fid-t2", "fid-t2-out", v => v.toFixed(1), redrawFid);
  hookRange("fid-latt", "fid-latt-out", v => v.toFixed(0), redrawFid);
  hookRange("fid-lmax", "fid-lmax-out", v => v.toFixed(0), redrawFid);

  // view 2: purification rate ratio
  const ratioCanvas = document.getElementById("ratio-canvas");
  const redrawRatio = () => {
    const k = parseInt(document.getElementById("ratio-k").value, 10);
    const logCm = parseFloat(document.getElementById("ratio-cm").value);
    const cm = Math.pow(10, logCm);
    document.getElementById("ratio-cm-out").textContent = cm.toFixed(2);
    const imperfect = document.getElementById("ratio-switches").checked;
    const data = extract(purification_ratio_curves(k, cm, imperfect, 70, 141));
    legend(document.getElementById("ratio-legend"), data.series);
    plotLines(ratioCanvas, data, "L (km)", "rate ratio", { hline: 1 });
  };
  document.getElementById("ratio-k").addEventListener("input", redrawRatio);
  document.getElementById("ratio-cm").addEventListener("input", redrawRatio);
  document.getElementById("ratio-switches").addEventListener("input", redrawRatio);

  // view 3: waiting-time distribution
  const waitCanvas = document.getElementById("wait-canvas");
  const redrawWait = () => {
    const n = parseInt(document.getElementById("wait-n").value, 10);
    const p0 = parseFloat(document.getElementById("wait-p0").value);
    const mean = waiting_time_mean(n, p0);
    const horizon = Math.max(10, Math.ceil(mean * 3));
    const data = extract(waiting_time_pmf(n, p0, horizon));
    legend(document.getElementById("wait-legend"), data.series);
    document.getElementById("wait-mean").textContent =
      `expected attempts: ${mean.toFixed(3)} (${(p0 * mean).toFixed(3)} in units of 1/P0)`;
    plotBars(waitCanvas, data, "attempts n", "probability");
  };
  hookRange("wait-n", "wait-n-out", v => v.toFixed(0), redrawWait);
  hookRange("wait-p0", "wait-p0-out", v => v.toFixed(2), redrawWait);

  redrawFid();
  redrawRatio();
  redrawWait();
}

main();
