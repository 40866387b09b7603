import init, { lineExplorer, unitIntervalCurves, treeTrm } from "./pkg/facloc_demo.js";

const COLORS = { wmm: "#d62728", tprm: "#1f77b4", trm: "#2ca02c" };
const $ = (id) => document.getElementById(id);

function call(fn, request, errorTarget) {
  try {
    errorTarget.classList.remove("err");
    return JSON.parse(fn(JSON.stringify(request)));
  } catch (e) {
    errorTarget.classList.add("err");
    errorTarget.textContent = String(e.message || e);
    return null;
  }
}

function fmt(q) {
  return q.value === null ? "inf" : `${q.exact} (${q.value.toFixed(4)})`;
}

// Line explorer

function drawLine(data, length, mediators) {
  const cv = $("line-canvas");
  const g = cv.getContext("2d");
  g.clearRect(0, 0, cv.width, cv.height);
  const x = (i) => 40 + (i / length) * (cv.width - 80);
  const axis = 150;
  g.strokeStyle = "#444";
  g.beginPath();
  g.moveTo(x(0), axis);
  g.lineTo(x(length), axis);
  g.stroke();
  g.fillStyle = "#444";
  g.textAlign = "center";
  for (let i = 0; i <= length; i++) {
    g.fillRect(x(i) - 1, axis - 4, 2, 8);
    g.fillText(String(i), x(i), axis + 18);
  }
  // agents stacked below the axis, one row per mediator
  mediators.forEach((agents, m) => {
    const counts = {};
    for (const a of agents) counts[a] = (counts[a] || 0) + 1;
    g.fillStyle = "#777";
    for (const [pos, n] of Object.entries(counts)) {
      for (let k = 0; k < n; k++) g.fillRect(x(+pos) - 3 + m * 7 - mediators.length * 3, axis + 26 + k * 5, 5, 4);
    }
  });
  const names = Object.keys(COLORS);
  names.forEach((name, k) => {
    const dist = data.mechanisms[name].distribution;
    g.fillStyle = COLORS[name];
    for (const [label, q] of Object.entries(dist)) {
      const h = q.value * 110;
      g.fillRect(x(+label) + (k - 1) * 9 - 4, axis - 8 - h, 8, h);
    }
    g.fillText(name, 60 + k * 60, 14);
  });
  g.strokeStyle = "#000";
  g.setLineDash([4, 3]);
  const opt = x(+data.optimum.location);
  g.beginPath();
  g.moveTo(opt, 20);
  g.lineTo(opt, axis);
  g.stroke();
  g.setLineDash([]);
}

function updateLine() {
  const length = +$("line-length").value;
  const mediators = $("line-mediators")
    .value.split("\n")
    .map((l) => l.trim())
    .filter((l) => l.length)
    .map((l) => l.split(/[\s,]+/).map(Number));
  const out = $("line-table");
  const data = call(lineExplorer, { length, mediators }, out);
  if (!data) return;
  drawLine(data, length, mediators);
  let rows = "<tr><th>mechanism</th><th>expected cost</th><th>ratio</th></tr>";
  for (const [name, m] of Object.entries(data.mechanisms)) {
    rows += `<tr><td style="color:${COLORS[name]}">${name}</td><td>${fmt(m.report.cost)}</td><td>${fmt(m.report.ratio)}</td></tr>`;
  }
  rows += `<tr><td>optimum at ${data.optimum.location}</td><td>${fmt(data.optimum.cost)}</td><td></td></tr>`;
  out.innerHTML = `<p>Mediator medians: ${data.medians.join(", ")}</p><table>${rows}</table>`;
}

// Ratio curves

function updateCurves() {
  const rMax = +$("curve-r").value;
  $("curve-r-value").textContent = rMax;
  const out = $("curve-last");
  const data = call(unitIntervalCurves, { r_max: rMax }, out);
  if (!data) return;
  const cv = $("curve-canvas");
  const g = cv.getContext("2d");
  g.clearRect(0, 0, cv.width, cv.height);
  const x = (r) => 40 + ((r - 1) / Math.max(rMax - 1, 1)) * (cv.width - 70);
  const y = (v) => cv.height - 25 - ((v - 1) / 2.2) * (cv.height - 45);
  g.strokeStyle = "#bbb";
  g.fillStyle = "#666";
  for (const v of [1, 2, 3]) {
    g.beginPath();
    g.moveTo(x(1), y(v));
    g.lineTo(x(rMax), y(v));
    g.stroke();
    g.fillText(String(v), 10, y(v) + 4);
  }
  for (const name of Object.keys(COLORS)) {
    g.strokeStyle = COLORS[name];
    g.beginPath();
    data.rows.forEach((row, i) => (i ? g.lineTo : g.moveTo).call(g, x(row.r), y(row[name].value)));
    g.stroke();
  }
  const last = data.rows[data.rows.length - 1];
  out.textContent = `r = ${last.r}: wmm ${fmt(last.wmm)}, tprm ${fmt(last.tprm)}, trm ${fmt(last.trm)}`;
}

// Tree

const LAYOUT = {
  R: [420, 40], E: [260, 130], F: [580, 130], A: [140, 220],
  B: [320, 220], D: [580, 220], B1: [320, 300], D1: [580, 300],
};
const DEFAULT_SIZES = { R: 24, A: 10, B: 1, B1: 25, D: 5, D1: 25, F: 10 };

function updateTree() {
  const sizes = {};
  for (const input of document.querySelectorAll("#tree-sizes input")) sizes[input.name] = +input.value;
  const out = $("tree-summary");
  const data = call(treeTrm, { sizes }, out);
  if (!data) return;
  const cv = $("tree-canvas");
  const g = cv.getContext("2d");
  g.clearRect(0, 0, cv.width, cv.height);
  g.strokeStyle = "#888";
  for (const [a, b] of data.edges) {
    g.beginPath();
    g.moveTo(...LAYOUT[a]);
    g.lineTo(...LAYOUT[b]);
    g.stroke();
  }
  g.textAlign = "center";
  for (const v of data.vertices) {
    const [px, py] = LAYOUT[v.name];
    const r = 8 + 30 * Math.sqrt(v.p.value);
    g.fillStyle = v.in_x ? "rgba(44,160,44,0.35)" : "rgba(150,150,150,0.25)";
    g.beginPath();
    g.arc(px, py, r, 0, 2 * Math.PI);
    g.fill();
    if (v.name === data.root) {
      g.strokeStyle = "#000";
      g.stroke();
    }
    g.fillStyle = "#000";
    g.fillText(`${v.name}  p=${v.p.exact}`, px, py - r - 4);
    g.fillStyle = "#555";
    g.fillText(`size ${v.size}, subtree ${v.treesize}`, px, py + r + 12);
  }
  out.innerHTML = `Root ${data.root}. Expected cost ${fmt(data.report.cost)}, optimum ${fmt(data.report.optimal_cost)}, ratio ${fmt(data.report.ratio)}.`;
}

function buildSizeInputs() {
  const box = $("tree-sizes");
  for (const [name, n] of Object.entries(DEFAULT_SIZES)) {
    const label = document.createElement("label");
    label.textContent = `${name} `;
    const input = document.createElement("input");
    Object.assign(input, { type: "number", min: 0, max: 200, value: n, name });
    input.addEventListener("input", updateTree);
    label.appendChild(input);
    box.appendChild(label);
  }
}

await init();
$("line-length").addEventListener("input", updateLine);
$("line-mediators").addEventListener("input", updateLine);
$("curve-r").addEventListener("input", updateCurves);
buildSizeInputs();
updateLine();
updateCurves();
updateTree();
