import { mkdirSync, writeFileSync } from "fs";
import { dirname } from "path";
import { column, readNumericCsv } from "./csv";
import { SchemaError } from "./errors";
import { FigureSpec, SeriesInput } from "./figspec";
import { GUIDE_COLOR, PALETTE, Panel, linearScale, logScale, symlogScale } from "./svg";

interface Series {
  readonly label: string;
  readonly points: ReadonlyArray<readonly [number, number]>;
}

function loadSeries(input: SeriesInput, xColumn: string, yColumn: string): Series {
  const table = readNumericCsv(input.path, [xColumn, yColumn]);
  const xs = column(table, xColumn);
  const ys = column(table, yColumn);
  return { label: input.label, points: xs.map((x, i) => [x, ys[i]] as const) };
}

function renderDrift(spec: FigureSpec): string {
  const series = spec.inputs.map((input) => loadSeries(input, "t", "value"));

  let tMin = Infinity, tMax = -Infinity, vMin = Infinity, vMax = -Infinity;
  let minNonzero = Infinity, maxAbs = 0;
  for (const s of series) {
    for (const [t, v] of s.points) {
      tMin = Math.min(tMin, t);
      tMax = Math.max(tMax, t);
      vMin = Math.min(vMin, v);
      vMax = Math.max(vMax, v);
      const a = Math.abs(v);
      maxAbs = Math.max(maxAbs, a);
      if (a > 0) {
        minNonzero = Math.min(minNonzero, a);
      }
    }
  }
  // Linear threshold for the symmetric log axis: the smallest magnitude in
  // the data, bounded so an extreme outlier cannot flatten everything.
  const linthresh = maxAbs === 0
    ? 1
    : Math.max(Math.min(minNonzero, maxAbs), maxAbs * 1e-12);

  const panel = new Panel(
    linearScale(tMin, tMax),
    symlogScale(Math.min(vMin, 0), Math.max(vMax, 0), linthresh),
    "t",
    "drift from initial value",
  );
  series.forEach((s, i) => {
    panel.polyline(s.points, PALETTE[i % PALETTE.length]);
  });
  panel.legend(series.map((s, i) => [s.label, PALETTE[i % PALETTE.length]] as const));
  return panel.serialize();
}

function renderOrder(spec: FigureSpec): string {
  const series = spec.inputs.map((input) => loadSeries(input, "h", "error"));

  let hMin = Infinity, hMax = -Infinity, eMin = Infinity, eMax = -Infinity;
  const positive: Series[] = series.map((s) => ({
    label: s.label,
    points: s.points.filter(([h, e]) => h > 0 && e > 0),
  }));
  for (const s of positive) {
    if (s.points.length === 0) {
      throw new SchemaError(
        `order figure needs positive (h, error) data; series '${s.label}' has none`);
    }
    for (const [h, e] of s.points) {
      hMin = Math.min(hMin, h);
      hMax = Math.max(hMax, h);
      eMin = Math.min(eMin, e);
      eMax = Math.max(eMax, e);
    }
  }

  // Dashed slope guides pass through the coarsest point of the first
  // series, offset downward so they do not overprint the data.
  const [hAnchor, eAnchor] = positive[0].points.reduce(
    (best, point) => (point[0] > best[0] ? point : best));
  for (const slope of spec.referenceSlopes) {
    eMin = Math.min(eMin, 0.5 * eAnchor * Math.pow(hMin / hAnchor, slope));
  }

  const panel = new Panel(
    logScale(hMin, hMax),
    logScale(eMin, eMax),
    "step size h",
    "error at final time",
  );
  for (const slope of spec.referenceSlopes) {
    const guide: Array<readonly [number, number]> = [
      [hMin, 0.5 * eAnchor * Math.pow(hMin / hAnchor, slope)],
      [hAnchor, 0.5 * eAnchor],
    ];
    panel.polyline(guide, GUIDE_COLOR, true);
    panel.guideLabel(guide[0][0], guide[0][1], `slope ${slope}`);
  }
  positive.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    panel.polyline(s.points, color);
    panel.markers(s.points, color);
  });
  panel.legend(positive.map((s, i) => [s.label, PALETTE[i % PALETTE.length]] as const));
  return panel.serialize();
}

/** Render a parsed spec to its SVG string (pure; no filesystem writes). */
export function renderFigure(spec: FigureSpec): string {
  return spec.kind === "drift" ? renderDrift(spec) : renderOrder(spec);
}

/** Render and write spec.output; returns the path written. */
export function renderToFile(spec: FigureSpec): string {
  const svg = renderFigure(spec);
  mkdirSync(dirname(spec.output), { recursive: true });
  writeFileSync(spec.output, svg, "utf8");
  return spec.output;
}
