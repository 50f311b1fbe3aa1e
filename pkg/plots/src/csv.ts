/** Minimal CSV reader for the solver's benchmark output. Handles quoted
 * fields and returns one record object per row keyed by the header. */

export type Row = Record<string, string>;

export function parseCsv(text: string): Row[] {
  const rows = splitRows(text);
  if (rows.length === 0) return [];
  const header = rows[0];
  return rows.slice(1).map((cells) => {
    const row: Row = {};
    header.forEach((h, i) => {
      row[h] = cells[i] ?? "";
    });
    return row;
  });
}

function splitRows(text: string): string[][] {
  const out: string[][] = [];
  let cells: string[] = [];
  let cur = "";
  let quoted = false;
  for (let i = 0; i < text.length; i++) {
    const ch = text[i];
    if (quoted) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          cur += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      cells.push(cur);
      cur = "";
    } else if (ch === "\n" || ch === "\r") {
      if (ch === "\r" && text[i + 1] === "\n") i++;
      cells.push(cur);
      cur = "";
      if (cells.length > 1 || cells[0] !== "") out.push(cells);
      cells = [];
    } else {
      cur += ch;
    }
  }
  if (cur !== "" || cells.length > 0) {
    cells.push(cur);
    if (cells.length > 1 || cells[0] !== "") out.push(cells);
  }
  return out;
}

export function requireColumns(rows: Row[], cols: string[]): void {
  if (rows.length === 0) throw new Error("empty selection: no data rows");
  for (const c of cols) {
    if (!(c in rows[0])) {
      throw new Error(`missing column '${c}' in CSV header`);
    }
  }
}

export function num(row: Row, col: string): number {
  const v = row[col];
  if (v === undefined || v === "") return NaN;
  const x = Number(v);
  return Number.isFinite(x) ? x : NaN;
}
