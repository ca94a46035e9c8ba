import init, { generate, render, flip_to, route, analyze } from "./pkg/planeflip_wasm.js";

const $ = (id) => document.getElementById(id);
const state = { points: "[]", matching: "{}", frames: [] };

function log(text, isError = false) {
  const line = document.createElement("div");
  line.textContent = text;
  if (isError) line.className = "error";
  $("log").prepend(line);
}

function show(svg) {
  $("canvas").innerHTML = svg;
}

function attempt(fn) {
  try {
    fn();
  } catch (e) {
    log(String(e), true);
  }
}

function resetRoute() {
  state.frames = [];
  $("step").max = 0;
  $("step").value = 0;
  $("step").disabled = true;
}

function regenerate() {
  attempt(() => {
    const doc = JSON.parse(generate($("kind").value, Number($("size").value), Number($("seed").value)));
    state.points = JSON.stringify(doc.points);
    state.matching = JSON.stringify(doc.matching);
    resetRoute();
    show(render(state.points, state.matching));
    log(`${$("kind").value}: ${doc.points.length} points, unmatched ${doc.matching.unmatched}`);
  });
}

// Nearest point to a click, in the SVG's own coordinates.
function pickPoint(event) {
  const circles = [...$("canvas").querySelectorAll("circle")];
  const svg = $("canvas").querySelector("svg");
  if (!svg || circles.length === 0) return null;
  const box = svg.getBoundingClientRect();
  const scale = svg.viewBox.baseVal.width / box.width;
  const x = (event.clientX - box.left) * scale;
  const y = (event.clientY - box.top) * scale;
  let best = null;
  circles.forEach((c, i) => {
    const d = Math.hypot(c.cx.baseVal.value - x, c.cy.baseVal.value - y);
    if (d < 15 && (best === null || d < best.d)) best = { i, d };
  });
  return best && best.i;
}

$("canvas").addEventListener("click", (event) => {
  const q = pickPoint(event);
  if (q === null) return;
  attempt(() => {
    const out = JSON.parse(flip_to(state.points, state.matching, q, $("rule").value));
    state.matching = JSON.stringify(out.matching);
    resetRoute();
    show(out.svg);
    log(`flipped onto ${q}; unmatched is now ${out.matching.unmatched}`);
  });
});

$("route").addEventListener("click", () => {
  attempt(() => {
    const out = JSON.parse(route(state.points, state.matching, $("target").value, $("shortest").checked));
    state.frames = out.frames;
    state.matching = JSON.stringify(out.end);
    $("step").max = out.frames.length - 1;
    $("step").value = out.frames.length - 1;
    $("step").disabled = out.frames.length < 2;
    show(out.frames[out.frames.length - 1]);
    log(`route to ${$("target").value}: ${out.length} flips ` + out.flips.map((f) => `(${f.join(" ")})`).join(" "));
  });
});

$("step").addEventListener("input", () => {
  const frame = state.frames[Number($("step").value)];
  if (frame) show(frame);
});

$("analyze").addEventListener("click", () => {
  attempt(() => {
    const r = JSON.parse(analyze(state.points, $("rule").value));
    log(
      `flip graph (${r.rule}): ${r.vertex_count} matchings, ${r.edge_count} flips, ` +
        `${r.components} component(s), diameter ${r.diameter ?? "undefined"}`
    );
  });
});

$("gen").addEventListener("click", regenerate);

await init();
regenerate();
