import init, { Planted, hard_instance_profile } from './pkg/nibble_wasm.js';

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
let planted = null;

// Draws polylines given as arrays of [x, y] points on shared axes.
function plot(canvas, series, { logY = false } = {}) {
  const ctx = canvas.getContext('2d');
  const { width: w, height: h } = canvas;
  const pad = 36;
  ctx.clearRect(0, 0, w, h);
  const ty = (y) => (logY ? Math.log10(Math.max(y, 1e-300)) : y);
  const pts = series.flatMap((s) => s.points);
  if (pts.length === 0) return;
  const xs = pts.map((p) => p[0]);
  const ys = pts.map((p) => ty(p[1]));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((ty(y) - y0) / (y1 - y0 || 1)) * (h - 2 * pad);
  ctx.strokeStyle = '#999';
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = '#555';
  ctx.font = '11px sans-serif';
  const fmt = (v) => (Math.abs(v) >= 1e4 || (v !== 0 && Math.abs(v) < 1e-2) ? v.toExponential(1) : v.toFixed(2));
  ctx.fillText(fmt(x0), pad, h - pad + 14);
  ctx.fillText(fmt(x1), w - pad - 30, h - pad + 14);
  ctx.fillText(logY ? `1e${y1.toFixed(1)}` : fmt(y1), 2, pad + 4);
  ctx.fillText(logY ? `1e${y0.toFixed(1)}` : fmt(y0), 2, h - pad);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.beginPath();
    s.points.forEach(([x, y], i) => (i ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
    ctx.stroke();
  }
}

function guard(out, f) {
  try {
    f();
  } catch (e) {
    $(out).textContent = `error: ${e.message ?? e}`;
  }
}

$('generate').onclick = () =>
  guard('graph-info', () => {
    planted?.free();
    planted = new Planted(num('beta'), num('rng'));
    const s = JSON.parse(planted.summary);
    $('graph-info').textContent =
      `${s.vertices} vertices, ${s.edges} edges; vol(A) = ${s.target_volume}, phi(A) = ${s.target_phi.toFixed(5)}`;
    $('nib-vol0').value = s.target_volume;
  });

$('sweep').onclick = () =>
  guard('sweep-info', () => {
    if (!planted) $('generate').onclick();
    const r = JSON.parse(planted.sweep(num('sweep-seed'), num('sweep-alpha'), num('sweep-eps')));
    plot($('phi-plot'), [{ points: r.prefixes, color: '#c33' }], { logY: true });
    const diagonal = [[0, 0], [r.total_volume, r.curve[r.curve.length - 1][1]]];
    plot($('ls-plot'), [
      { points: diagonal, color: '#bbb' },
      { points: r.curve, color: '#36c' },
    ]);
    $('sweep-info').textContent =
      `${r.pushes} pushes, support ${r.support}; best prefix: ${r.best.size} vertices, ` +
      `volume ${r.best.volume}, phi ${r.best.phi.toFixed(5)}, ${r.best.in_target} in A`;
  });

$('cluster').onclick = () =>
  guard('cluster-info', () => {
    if (!planted) $('generate').onclick();
    const r = JSON.parse(planted.cluster(num('nib-seed'), num('nib-conn'), num('nib-vol0')));
    $('cluster-info').textContent =
      `alpha ${r.alpha.toExponential(3)}, eps ${r.epsilon.toExponential(3)}, ${r.candidates} candidate cuts\n` +
      `output: ${r.size} vertices, phi ${r.phi.toFixed(5)}, precision ${r.precision?.toFixed(3)}, ` +
      `recall ${r.recall.toFixed(3)}, accuracy ${r.accuracy.toFixed(4)}`;
  });

$('hard').onclick = () =>
  guard('hard-info', () => {
    const r = JSON.parse(hard_instance_profile(num('ell'), num('phi-ell2'), num('gamma')));
    const scale = (arr) => arr.map((y, i) => [i / (arr.length - 1), y]);
    plot($('hard-plot'), [
      { points: scale(r.top), color: '#36c' },
      { points: scale(r.bottom), color: '#c63' },
    ], { logY: true });
    $('hard-info').textContent =
      `${r.vertices} vertices, alpha ${r.alpha.toExponential(3)}; blue: top chain a..c, orange: bottom chain d..e ` +
      `(positions scaled to [0, 1]). p(d)/deg(d) = ${r.d.toExponential(4)} ` +
      `${r.d > r.c ? '>' : '<='} p(c)/deg(c) = ${r.c.toExponential(4)}`;
  });

await init();
$('generate').onclick();
