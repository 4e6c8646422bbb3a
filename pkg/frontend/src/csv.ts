/**
 * Reader for the CSV files produced by the rdtcombine CLI.
 *
 * Files may start with a `# config: {...}` comment line echoing the run
 * configuration; the first non-comment line is the header. Values are kept
 * as raw strings; numeric extraction happens per column so that errors can
 * name the offending column and the numbers survive a float round-trip
 * (Number(raw) is stored, never reformatted).
 */

export interface CsvTable {
  /** parsed `# config:` echo when present */
  config: unknown | null;
  header: string[];
  rows: string[][];
}

export class CsvError extends Error {}

function splitLine(line: string): string[] {
  // the rdtcombine writers never quote fields (names are checked upstream)
  return line.split(",");
}

export function parseCsv(text: string): CsvTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  let config: unknown | null = null;
  let start = 0;
  while (start < lines.length && lines[start]!.startsWith("#")) {
    const line = lines[start]!;
    const marker = "# config: ";
    if (line.startsWith(marker)) {
      config = JSON.parse(line.slice(marker.length));
    }
    start += 1;
  }
  if (start >= lines.length) {
    throw new CsvError("empty CSV: no header line");
  }
  const header = splitLine(lines[start]!);
  const rows: string[][] = [];
  for (let i = start + 1; i < lines.length; i++) {
    const row = splitLine(lines[i]!);
    if (row.length !== header.length) {
      throw new CsvError(
        `row ${i - start} has ${row.length} fields, header has ${header.length}`,
      );
    }
    rows.push(row);
  }
  if (rows.length === 0) {
    throw new CsvError("empty CSV: no data rows");
  }
  return { config, header, rows };
}

export function requireColumns(table: CsvTable, names: string[]): Map<string, number> {
  const index = new Map<string, number>();
  table.header.forEach((name, i) => index.set(name, i));
  const missing = names.filter((name) => !index.has(name));
  if (missing.length > 0) {
    throw new CsvError(`missing column(s): ${missing.join(", ")}`);
  }
  return index;
}

export function numericColumn(table: CsvTable, column: string): number[] {
  const index = requireColumns(table, [column]).get(column)!;
  return table.rows.map((row, r) => {
    const value = Number(row[index]);
    if (!Number.isFinite(value)) {
      throw new CsvError(`column ${column}, row ${r + 1}: not a number: ${row[index]}`);
    }
    return value;
  });
}

export function stringColumn(table: CsvTable, column: string): string[] {
  const index = requireColumns(table, [column]).get(column)!;
  return table.rows.map((row) => row[index]!);
}
