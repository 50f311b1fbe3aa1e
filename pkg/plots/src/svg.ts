/** Deterministic SVG primitives: pure string assembly, fixed precision,
 * no timestamps or randomness, so re-renders are byte-identical. */

export const WIDTH = 460;
export const HEIGHT = 340;
export const MARGIN = { top: 34, right: 16, bottom: 46, left: 58 };

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toPrecision(6);
  return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface Scale {
  (x: number): number;
  ticks: number[];
  label(t: number): string;
}

export function linearScale(lo: number, hi: number, a: number, b: number): Scale {
  if (hi <= lo) hi = lo + 1;
  const f = ((x: number) => a + ((x - lo) / (hi - lo)) * (b - a)) as Scale;
  const step = niceStep(hi - lo);
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12; t += step) {
    ticks.push(Number(t.toPrecision(10)));
  }
  f.ticks = ticks;
  f.label = (t) => fmt(t);
  return f;
}

export function log2Scale(values: number[], a: number, b: number): Scale {
  const lo = Math.log2(Math.min(...values));
  const hi = Math.log2(Math.max(...values));
  const span = hi <= lo ? 1 : hi - lo;
  const f = ((x: number) => a + ((Math.log2(x) - lo) / span) * (b - a)) as Scale;
  const ticks: number[] = [];
  const step = Math.max(1, Math.round(span / 6));
  for (let e = Math.ceil(lo); e <= hi + 1e-9; e += step) ticks.push(2 ** e);
  f.ticks = ticks.length > 0 ? ticks : [2 ** Math.round(lo)];
  f.label = (t) => `2^${Math.round(Math.log2(t))}`;
  return f;
}

function niceStep(span: number): number {
  const raw = span / 5;
  const mag = 10 ** Math.floor(Math.log10(raw));
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b"];

export class Panel {
  parts: string[] = [];
  constructor(
    public x0: number,
    public y0: number,
    public title: string,
  ) {}

  readonly plotLeft = MARGIN.left;
  readonly plotRight = WIDTH - MARGIN.right;
  readonly plotTop = MARGIN.top;
  readonly plotBottom = HEIGHT - MARGIN.bottom;

  axes(xs: Scale, ys: Scale, xlabel: string, ylabel: string): void {
    const p = this.parts;
    p.push(`<text x="${fmt(WIDTH / 2)}" y="18" text-anchor="middle" class="title">${esc(this.title)}</text>`);
    p.push(`<rect x="${this.plotLeft}" y="${this.plotTop}" width="${this.plotRight - this.plotLeft}" height="${this.plotBottom - this.plotTop}" class="frame"/>`);
    for (const t of xs.ticks) {
      const x = fmt(xs(t));
      p.push(`<line x1="${x}" y1="${this.plotBottom}" x2="${x}" y2="${this.plotBottom + 4}" class="tick"/>`);
      p.push(`<text x="${x}" y="${this.plotBottom + 17}" text-anchor="middle" class="ticklabel">${esc(xs.label(t))}</text>`);
    }
    for (const t of ys.ticks) {
      const y = fmt(ys(t));
      p.push(`<line x1="${this.plotLeft - 4}" y1="${y}" x2="${this.plotLeft}" y2="${y}" class="tick"/>`);
      p.push(`<text x="${this.plotLeft - 7}" y="${y}" text-anchor="end" dominant-baseline="middle" class="ticklabel">${esc(ys.label(t))}</text>`);
    }
    p.push(`<text x="${fmt((this.plotLeft + this.plotRight) / 2)}" y="${HEIGHT - 10}" text-anchor="middle" class="axis">${esc(xlabel)}</text>`);
    p.push(`<text x="16" y="${fmt((this.plotTop + this.plotBottom) / 2)}" text-anchor="middle" class="axis" transform="rotate(-90 16 ${fmt((this.plotTop + this.plotBottom) / 2)})">${esc(ylabel)}</text>`);
  }

  polyline(pts: [number, number][], color: string, dash = ""): void {
    const d = pts.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(`<polyline points="${d}" fill="none" stroke="${color}" stroke-width="1.5"${dashAttr}/>`);
  }

  marker(x: number, y: number, color: string, value: number, series: string): void {
    this.parts.push(
      `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="3" fill="${color}" ` +
      `data-series="${esc(series)}" data-value="${fmt(value)}"/>`,
    );
  }

  errorBar(x: number, yLo: number, yHi: number, color: string): void {
    this.parts.push(`<line x1="${fmt(x)}" y1="${fmt(yLo)}" x2="${fmt(x)}" y2="${fmt(yHi)}" stroke="${color}" stroke-width="1"/>`);
    for (const y of [yLo, yHi]) {
      this.parts.push(`<line x1="${fmt(x - 3)}" y1="${fmt(y)}" x2="${fmt(x + 3)}" y2="${fmt(y)}" stroke="${color}" stroke-width="1"/>`);
    }
  }

  bar(x: number, w: number, yBase: number, yTop: number, color: string, value: number, series: string): void {
    const y = Math.min(yBase, yTop);
    const h = Math.abs(yBase - yTop);
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ` +
      `fill="${color}" fill-opacity="0.8" data-series="${esc(series)}" data-value="${fmt(value)}"/>`,
    );
  }

  hline(y: number, color: string, dash = "4 3"): void {
    this.parts.push(`<line x1="${this.plotLeft}" y1="${fmt(y)}" x2="${this.plotRight}" y2="${fmt(y)}" stroke="${color}" stroke-dasharray="${dash}" stroke-width="1"/>`);
  }

  legend(entries: [string, string][]): void {
    let y = this.plotTop + 12;
    for (const [label, color] of entries) {
      this.parts.push(`<line x1="${this.plotLeft + 8}" y1="${fmt(y - 3)}" x2="${this.plotLeft + 28}" y2="${fmt(y - 3)}" stroke="${color}" stroke-width="2"/>`);
      this.parts.push(`<text x="${this.plotLeft + 33}" y="${fmt(y)}" class="legend">${esc(label)}</text>`);
      y += 14;
    }
  }

  render(): string {
    return `<g transform="translate(${this.x0} ${this.y0})">${this.parts.join("")}</g>`;
  }
}

export function document(panels: Panel[], cols: number): string {
  const rows = Math.ceil(panels.length / cols);
  const style = [
    "text{font-family:Helvetica,Arial,sans-serif;fill:#222}",
    ".title{font-size:13px;font-weight:bold}",
    ".axis{font-size:11px}",
    ".ticklabel{font-size:9px}",
    ".legend{font-size:10px}",
    ".frame{fill:none;stroke:#444;stroke-width:1}",
    ".tick{stroke:#444;stroke-width:1}",
  ].join("");
  const w = cols * WIDTH;
  const h = rows * HEIGHT;
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${w}" height="${h}" viewBox="0 0 ${w} ${h}">` +
    `<style>${style}</style><rect width="${w}" height="${h}" fill="white"/>` +
    panels.map((p) => p.render()).join("") +
    `</svg>\n`
  );
}
