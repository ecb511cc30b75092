/** A plain SVG line overlay: one predicted series per symbol, observed
 * samples as dots. No axes math beyond a linear fit to the viewbox. */

const WIDTH = 560;
const HEIGHT = 220;
const PAD = 34;

const SVG_NS = "http://www.w3.org/2000/svg";

interface Extent {
  min: number;
  max: number;
}

function extent(values: number[]): Extent {
  const min = Math.min(...values);
  const max = Math.max(...values);
  return max === min ? { min: min - 1, max: max + 1 } : { min, max };
}

export function seriesChart(
  series: Record<string, [number, number][]>,
  observed: [number, number][],
): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "series-chart");

  const xs: number[] = [];
  const ys: number[] = [];
  for (const points of Object.values(series)) {
    for (const [x, y] of points) {
      xs.push(x);
      ys.push(y);
    }
  }
  for (const [x, y] of observed) {
    xs.push(x);
    ys.push(y);
  }
  if (xs.length === 0) return svg;

  const ex = extent(xs);
  const ey = extent(ys);
  const sx = (x: number) =>
    PAD + ((x - ex.min) / (ex.max - ex.min)) * (WIDTH - 2 * PAD);
  const sy = (y: number) =>
    HEIGHT - PAD - ((y - ey.min) / (ey.max - ey.min)) * (HEIGHT - 2 * PAD);

  const symbols = Object.keys(series).sort();
  symbols.forEach((symbol, i) => {
    const line = document.createElementNS(SVG_NS, "polyline");
    line.setAttribute(
      "points",
      series[symbol].map(([x, y]) => `${sx(x)},${sy(y)}`).join(" "),
    );
    line.setAttribute("class", `series-line series-line-${i % 4}`);
    svg.appendChild(line);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(WIDTH - PAD + 4));
    const last = series[symbol][series[symbol].length - 1];
    label.setAttribute("y", last ? String(sy(last[1])) : String(PAD));
    label.setAttribute("class", `series-label series-line-${i % 4}`);
    label.textContent = symbol;
    svg.appendChild(label);
  });

  for (const [x, y] of observed) {
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(sx(x)));
    dot.setAttribute("cy", String(sy(y)));
    dot.setAttribute("r", "3");
    dot.setAttribute("class", "observed-dot");
    svg.appendChild(dot);
  }

  for (const [value, x, y, anchor] of [
    [ex.min, PAD, HEIGHT - 12, "start"],
    [ex.max, WIDTH - PAD, HEIGHT - 12, "end"],
  ] as const) {
    const tick = document.createElementNS(SVG_NS, "text");
    tick.setAttribute("x", String(x));
    tick.setAttribute("y", String(y));
    tick.setAttribute("text-anchor", anchor);
    tick.setAttribute("class", "axis-tick");
    tick.textContent = String(value);
    svg.appendChild(tick);
  }
  return svg;
}
