/** Deterministic SVG primitives: fixed layout, fixed palette, fixed number
 *  formatting, no timestamps — identical inputs give identical bytes. */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 80, right: 24, top: 24, bottom: 56 } as const;

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2",
] as const;

export const GUIDE_COLOR = "#888888";

/** Pixel coordinate: two decimals, with negative zero normalized. */
export function px(value: number): string {
  const s = value.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Human tick label: plain decimals in mid-range, '1e-12' style outside. */
export function labelNum(value: number): string {
  if (value === 0) {
    return "0";
  }
  const magnitude = Math.abs(value);
  if (magnitude >= 1e-3 && magnitude < 1e4) {
    return String(Number(value.toPrecision(6)));
  }
  const [mantissa, exponent] = value.toExponential(6).split("e");
  return `${Number(mantissa)}e${Number(exponent)}`;
}

export interface Tick {
  readonly value: number;
  readonly label: string;
}

/** A one-dimensional map from data values to [0, 1]. */
export interface Scale {
  readonly fwd: (value: number) => number;
  readonly ticks: readonly Tick[];
}

function niceStep(span: number): number {
  const raw = span / 5;
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  const unit = raw / power;
  const nice = unit >= 5 ? 5 : unit >= 2 ? 2 : 1;
  return nice * power;
}

export function linearScale(min: number, max: number): Scale {
  if (!(max > min)) {
    const pad = Math.max(Math.abs(min), 1) * 0.5;
    min -= pad;
    max += pad;
  }
  const step = niceStep(max - min);
  const ticks: Tick[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    const rounded = Math.abs(v) < step * 1e-9 ? 0 : v;
    ticks.push({ value: rounded, label: labelNum(rounded) });
  }
  const span = max - min;
  return { fwd: (v) => (v - min) / span, ticks };
}

/** Every decade gets a tick; crowded axes keep every k-th decade. */
function decadeTicks(expLo: number, expHi: number): number[] {
  const count = expHi - expLo + 1;
  const stride = Math.max(1, Math.ceil(count / 7));
  const exps: number[] = [];
  for (let e = expHi; e >= expLo; e -= stride) {
    exps.push(e);
  }
  return exps.reverse();
}

export function logScale(min: number, max: number): Scale {
  const expLo = Math.floor(Math.log10(min) + 1e-12);
  const expHi = Math.ceil(Math.log10(max) - 1e-12);
  const lo = expLo === expHi ? expLo - 1 : expLo;
  const ticks = decadeTicks(lo, expHi).map((e) => ({
    value: Math.pow(10, e),
    label: `1e${e}`,
  }));
  const span = expHi - lo;
  return { fwd: (v) => (Math.log10(v) - lo) / span, ticks };
}

/** Symmetric log: linear inside +-linthresh, decades outside; handles drift
 *  series that change sign and span many decades. */
export function symlogScale(minVal: number, maxVal: number, linthresh: number): Scale {
  const tf = (v: number) => Math.sign(v) * Math.log10(1 + Math.abs(v) / linthresh);
  let lo = tf(minVal);
  let hi = tf(maxVal);
  if (!(hi > lo)) {
    lo -= 1;
    hi += 1;
  }
  const pad = (hi - lo) * 0.05;
  lo -= pad;
  hi += pad;

  const maxAbs = Math.max(Math.abs(minVal), Math.abs(maxVal));
  const expLo = Math.ceil(Math.log10(linthresh) - 1e-12);
  const expHi = Math.floor(Math.log10(Math.max(maxAbs, linthresh * 10)) + 1e-12);
  const ticks: Tick[] = [{ value: 0, label: "0" }];
  if (expHi >= expLo) {
    for (const e of decadeTicks(expLo, expHi)) {
      const v = Math.pow(10, e);
      if (maxVal >= v) {
        ticks.push({ value: v, label: `1e${e}` });
      }
      if (minVal <= -v) {
        ticks.push({ value: -v, label: `-1e${e}` });
      }
    }
  }
  ticks.sort((a, b) => a.value - b.value);
  const span = hi - lo;
  return { fwd: (v) => (tf(v) - lo) / span, ticks };
}

/** Assembles one panel; callers push data marks, then serialize.  All
 *  geometry is rounded to hundredths of a pixel for byte stability. */
export class Panel {
  private readonly parts: string[] = [];

  constructor(
    private readonly xScale: Scale,
    private readonly yScale: Scale,
    private readonly xLabel: string,
    private readonly yLabel: string,
  ) {}

  xPix(value: number): number {
    return MARGIN.left + this.xScale.fwd(value) * (WIDTH - MARGIN.left - MARGIN.right);
  }

  yPix(value: number): number {
    return HEIGHT - MARGIN.bottom
      - this.yScale.fwd(value) * (HEIGHT - MARGIN.top - MARGIN.bottom);
  }

  polyline(points: ReadonlyArray<readonly [number, number]>, color: string,
           dashed = false): void {
    const coords = points
      .map(([x, y]) => `${px(this.xPix(x))},${px(this.yPix(y))}`)
      .join(" ");
    const dash = dashed ? ' stroke-dasharray="6 4"' : "";
    this.parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="1.5"${dash} points="${coords}"/>`);
  }

  markers(points: ReadonlyArray<readonly [number, number]>, color: string): void {
    for (const [x, y] of points) {
      this.parts.push(
        `<circle cx="${px(this.xPix(x))}" cy="${px(this.yPix(y))}" r="3" fill="${color}"/>`);
    }
  }

  guideLabel(x: number, y: number, text: string): void {
    this.parts.push(
      `<text x="${px(this.xPix(x))}" y="${px(this.yPix(y) - 6)}" font-size="11" `
      + `fill="${GUIDE_COLOR}">${esc(text)}</text>`);
  }

  legend(entries: ReadonlyArray<readonly [string, string]>): void {
    const x = MARGIN.left + 12;
    let y = MARGIN.top + 14;
    for (const [label, color] of entries) {
      this.parts.push(
        `<line x1="${px(x)}" y1="${px(y - 4)}" x2="${px(x + 22)}" y2="${px(y - 4)}" `
        + `stroke="${color}" stroke-width="2"/>`);
      this.parts.push(
        `<text x="${px(x + 28)}" y="${px(y)}" font-size="12" fill="#222222">`
        + `${esc(label)}</text>`);
      y += 18;
    }
  }

  serialize(): string {
    const left = MARGIN.left;
    const right = WIDTH - MARGIN.right;
    const top = MARGIN.top;
    const bottom = HEIGHT - MARGIN.bottom;
    const pieces: string[] = [];
    pieces.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" `
      + `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`);
    pieces.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);

    for (const tick of this.xScale.ticks) {
      const x = px(this.xPix(tick.value));
      pieces.push(
        `<line x1="${x}" y1="${px(top)}" x2="${x}" y2="${px(bottom)}" `
        + `stroke="#dddddd" stroke-width="1"/>`);
      pieces.push(
        `<text x="${x}" y="${px(bottom + 18)}" font-size="11" fill="#222222" `
        + `text-anchor="middle">${esc(tick.label)}</text>`);
    }
    for (const tick of this.yScale.ticks) {
      const y = px(this.yPix(tick.value));
      pieces.push(
        `<line x1="${px(left)}" y1="${y}" x2="${px(right)}" y2="${y}" `
        + `stroke="#dddddd" stroke-width="1"/>`);
      pieces.push(
        `<text x="${px(left - 8)}" y="${px(Number(y) + 4)}" font-size="11" `
        + `fill="#222222" text-anchor="end">${esc(tick.label)}</text>`);
    }

    pieces.push(
      `<rect x="${px(left)}" y="${px(top)}" width="${px(right - left)}" `
      + `height="${px(bottom - top)}" fill="none" stroke="#222222" stroke-width="1"/>`);
    pieces.push(
      `<text x="${px((left + right) / 2)}" y="${px(HEIGHT - 14)}" font-size="13" `
      + `fill="#222222" text-anchor="middle">${esc(this.xLabel)}</text>`);
    pieces.push(
      `<text x="18" y="${px((top + bottom) / 2)}" font-size="13" fill="#222222" `
      + `text-anchor="middle" transform="rotate(-90 18 ${px((top + bottom) / 2)})">`
      + `${esc(this.yLabel)}</text>`);

    pieces.push(...this.parts);
    pieces.push("</svg>");
    return pieces.join("\n") + "\n";
  }
}
