/** Panel builders mirroring the benchmark figures: value-vs-dimension curves
 * with error bars, rounded/SDP ratio curves with a unit guide, constraint
 * count bars, and the sparsifier error-vs-samples diagnostic. */

import { Row, num, requireColumns } from "./csv.js";
import { HEIGHT, PALETTE, Panel, WIDTH, fmt, linearScale, log2Scale } from "./svg.js";

interface SeriesPoint {
  d: number;
  mean: number;
  lo: number;
  hi: number;
  raw: { value: number; row: Row }[];
}

function groupSeries(
  rows: Row[],
  value: (r: Row) => number,
  lo?: (r: Row) => number,
  hi?: (r: Row) => number,
): Map<string, SeriesPoint[]> {
  const byMode = new Map<string, Map<number, { value: number; row: Row }[]>>();
  for (const r of rows) {
    if (r.status && r.status !== "ok") continue;
    const v = value(r);
    if (!Number.isFinite(v)) continue;
    const mode = r.constraint_mode ?? "?";
    const d = num(r, "D");
    if (!byMode.has(mode)) byMode.set(mode, new Map());
    const byD = byMode.get(mode)!;
    if (!byD.has(d)) byD.set(d, []);
    byD.get(d)!.push({ value: v, row: r });
  }
  const out = new Map<string, SeriesPoint[]>();
  for (const [mode, byD] of [...byMode.entries()].sort()) {
    const pts: SeriesPoint[] = [];
    for (const [d, raw] of [...byD.entries()].sort((a, b) => a[0] - b[0])) {
      const vals = raw.map((x) => x.value);
      const mean = vals.reduce((a, b) => a + b, 0) / vals.length;
      let spread = 0;
      if (vals.length > 1) {
        const varsum = vals.reduce((a, b) => a + (b - mean) ** 2, 0);
        spread = Math.sqrt(varsum / (vals.length - 1) / vals.length);
      }
      let loV = mean - spread;
      let hiV = mean + spread;
      if (lo && hi && raw.length > 0) {
        loV = Math.min(...raw.map((x) => lo(x.row)));
        hiV = Math.max(...raw.map((x) => hi(x.row)));
      }
      pts.push({ d, mean, lo: loV, hi: hiV, raw });
    }
    out.set(mode, pts);
  }
  return out;
}

function dims(series: Map<string, SeriesPoint[]>): number[] {
  const s = new Set<number>();
  for (const pts of series.values()) for (const p of pts) s.add(p.d);
  return [...s].sort((a, b) => a - b);
}

export function valuesPanel(rows: Row[], x0 = 0, y0 = 0): Panel {
  requireColumns(rows, ["D", "constraint_mode", "gw_upper", "gw_lower"]);
  const panel = new Panel(x0, y0, "SDP value vs dimension");
  const gw = groupSeries(rows, (r) => num(r, "gw_upper"),
    (r) => num(r, "gw_lower"), (r) => num(r, "gw_upper"));
  const rr = groupSeries(rows, (r) => num(r, "rounded_value"));
  const ds = dims(gw);
  const xs = log2Scale(ds, panel.plotLeft + 10, panel.plotRight - 10);
  let loY = Infinity;
  let hiY = -Infinity;
  for (const pts of [...gw.values(), ...rr.values()]) {
    for (const p of pts) {
      loY = Math.min(loY, p.lo);
      hiY = Math.max(hiY, p.hi);
    }
  }
  const ys = linearScale(loY - 0.05, hiY + 0.05, panel.plotBottom, panel.plotTop);
  panel.axes(xs, ys, "D = 2^n", "normalized value");
  const legend: [string, string][] = [];
  let ci = 0;
  for (const [mode, pts] of gw.entries()) {
    const color = PALETTE[ci % PALETTE.length];
    panel.polyline(pts.map((p) => [xs(p.d), ys(p.mean)]), color);
    for (const p of pts) {
      panel.errorBar(xs(p.d), ys(p.lo), ys(p.hi), color);
      panel.marker(xs(p.d), ys(p.mean), color, p.mean, `gw:${mode}`);
    }
    legend.push([`GW upper (${mode})`, color]);
    const rpts = rr.get(mode) ?? [];
    if (rpts.length > 0) {
      panel.polyline(rpts.map((p) => [xs(p.d), ys(p.mean)]), color, "5 3");
      for (const p of rpts) {
        panel.errorBar(xs(p.d), ys(p.lo), ys(p.hi), color);
        panel.marker(xs(p.d), ys(p.mean), color, p.mean, `rounded:${mode}`);
      }
      legend.push([`rounded (${mode})`, color]);
    }
    ci++;
  }
  panel.legend(legend);
  return panel;
}

export function ratioPanel(rows: Row[], x0 = 0, y0 = 0): Panel {
  requireColumns(rows, ["D", "constraint_mode", "gw_upper", "rounded_value"]);
  const panel = new Panel(x0, y0, "rounded / SDP ratio");
  const ratio = (r: Row) => {
    const explicit = num(r, "ratio");
    if (Number.isFinite(explicit)) return explicit;
    return num(r, "rounded_value") / num(r, "gw_upper");
  };
  const series = groupSeries(rows, ratio);
  const ds = dims(series);
  const xs = log2Scale(ds, panel.plotLeft + 10, panel.plotRight - 10);
  let loY = Infinity;
  let hiY = 1.0;
  for (const pts of series.values()) {
    for (const p of pts) {
      for (const r of p.raw) {
        loY = Math.min(loY, r.value);
        hiY = Math.max(hiY, r.value);
      }
    }
  }
  const ys = linearScale(Math.min(loY - 0.05, 0.0), hiY + 0.05,
    panel.plotBottom, panel.plotTop);
  panel.axes(xs, ys, "D = 2^n", "rounded / SDP");
  panel.hline(ys(1.0), "#888");
  const legend: [string, string][] = [];
  let ci = 0;
  for (const [mode, pts] of series.entries()) {
    const color = PALETTE[ci % PALETTE.length];
    panel.polyline(pts.map((p) => [xs(p.d), ys(p.mean)]), color);
    for (const p of pts) {
      for (const r of p.raw) {
        panel.marker(xs(p.d), ys(r.value), color, r.value, `ratio:${mode}`);
      }
    }
    legend.push([`ratio (${mode})`, color]);
    ci++;
  }
  panel.legend(legend);
  return panel;
}

export function constraintsPanel(rows: Row[], x0 = 0, y0 = 0): Panel {
  requireColumns(rows, ["D", "constraint_mode", "constraint_count"]);
  const panel = new Panel(x0, y0, "constraint counts");
  const series = groupSeries(rows, (r) => num(r, "constraint_count"));
  const ds = dims(series);
  const modes = [...series.keys()];
  const xIndex = new Map(ds.map((d, i) => [d, i]));
  const span = panel.plotRight - panel.plotLeft;
  const slot = span / Math.max(1, ds.length);
  const barW = (slot * 0.7) / Math.max(1, modes.length);
  let hiY = 1;
  for (const pts of series.values()) for (const p of pts) hiY = Math.max(hiY, p.mean);
  const ys = linearScale(0, hiY * 1.08, panel.plotBottom, panel.plotTop);
  const xs = log2Scale(ds, panel.plotLeft + slot / 2, panel.plotRight - slot / 2);
  panel.axes(xs, ys, "D = 2^n", "constraints used");
  const legend: [string, string][] = [];
  modes.forEach((mode, mi) => {
    const color = PALETTE[mi % PALETTE.length];
    for (const p of series.get(mode)!) {
      const i = xIndex.get(p.d)!;
      const cx = panel.plotLeft + slot * (i + 0.5);
      const x = cx - (modes.length * barW) / 2 + mi * barW;
      panel.bar(x, barW - 1, ys(0), ys(p.mean), color, p.mean, `constraints:${mode}`);
    }
    legend.push([`|S| (${mode})`, color]);
  });
  panel.legend(legend);
  return panel;
}

export function sparsifierErrorPanel(rows: Row[], x0 = 0, y0 = 0): Panel {
  requireColumns(rows, ["m", "error"]);
  const panel = new Panel(x0, y0, "sparsifier error vs samples");
  const pts = rows
    .map((r) => ({ m: num(r, "m"), e: num(r, "error") }))
    .filter((p) => Number.isFinite(p.m) && Number.isFinite(p.e) && p.e > 0)
    .sort((a, b) => a.m - b.m);
  if (pts.length === 0) throw new Error("empty selection: no finite error rows");
  const xs = log2Scale(pts.map((p) => p.m), panel.plotLeft + 10, panel.plotRight - 10);
  const logs = pts.map((p) => Math.log2(p.e));
  const ys = linearScale(Math.min(...logs) - 0.5, Math.max(...logs) + 0.5,
    panel.plotBottom, panel.plotTop);
  ys.label = (t) => `2^${fmt(t)}`;
  panel.axes(xs, ys, "samples m", "operator-norm error");
  panel.polyline(pts.map((p) => [xs(p.m), ys(Math.log2(p.e))]), PALETTE[0]);
  for (const p of pts) {
    panel.marker(xs(p.m), ys(Math.log2(p.e)), PALETTE[0], p.e, "error");
  }
  // m^(-1/2) guide through the first point
  const ref = pts[0];
  panel.polyline(
    pts.map((p) => [xs(p.m), ys(Math.log2(ref.e) - 0.5 * Math.log2(p.m / ref.m))]),
    "#888", "4 3",
  );
  panel.legend([["measured", PALETTE[0]], ["m^-1/2 guide", "#888"]]);
  return panel;
}

export type FigureKind =
  | "values" | "ratio" | "constraints" | "sparsifier_error" | "fig1" | "fig3";

export function buildPanels(kind: FigureKind, rows: Row[]): Panel[] {
  switch (kind) {
    case "values":
      return [valuesPanel(rows)];
    case "ratio":
      return [ratioPanel(rows)];
    case "constraints":
      return [constraintsPanel(rows)];
    case "sparsifier_error":
      return [sparsifierErrorPanel(rows)];
    case "fig1":
      return [valuesPanel(rows, 0, 0), ratioPanel(rows, WIDTH, 0)];
    case "fig3":
      return [
        valuesPanel(rows, 0, 0),
        ratioPanel(rows, WIDTH, 0),
        constraintsPanel(rows, 2 * WIDTH, 0),
      ];
    default:
      throw new Error(`unknown figure kind '${kind}'`);
  }
}
