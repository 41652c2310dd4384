/** Parsing for spherelab CSV files: `#` provenance lines, a header row,
 * then comma-separated data rows (no quoting in this dialect). */

export interface Table {
  columns: string[];
  rows: string[][];
  comments: string[];
}

export class SchemaError extends Error {}

/** One line of RFC-4180-style CSV: double quotes guard embedded commas. */
function splitCsvLine(line: string): string[] {
  const cells: string[] = [];
  let cur = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
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
    } else {
      cur += ch;
    }
  }
  cells.push(cur);
  return cells;
}

export function parseCsv(text: string): Table {
  const comments: string[] = [];
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  const data: string[][] = [];
  let columns: string[] | null = null;
  for (const line of lines) {
    if (line.startsWith("#")) {
      comments.push(line);
      continue;
    }
    const cells = splitCsvLine(line);
    if (columns === null) {
      columns = cells;
    } else {
      data.push(cells);
    }
  }
  if (columns === null) {
    throw new SchemaError("empty CSV: no header row found");
  }
  return { columns, rows: data, comments };
}

/** Assert the table carries every required column; names the gaps. */
export function requireColumns(table: Table, kind: string, required: string[]): void {
  const missing = required.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `schema mismatch for kind '${kind}': missing columns: ${missing.join(", ")} ` +
        `(found: ${table.columns.join(", ")})`,
    );
  }
}

export function numericColumn(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  return table.rows.map((r) => Number(r[idx]));
}

export function stringColumn(table: Table, name: string): string[] {
  const idx = table.columns.indexOf(name);
  return table.rows.map((r) => r[idx]);
}
