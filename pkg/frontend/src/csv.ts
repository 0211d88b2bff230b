// Reader for the simulator's aggregate/raw CSV contract.

export interface ResultRow {
  algorithm: string;
  axis: string;
  axisValue: number;
  sdps: number;
  seed: string;
  pdr: number;
  avgDelayUs: number | null;
  generated: number;
  delivered: number;
}

export const EXPECTED_HEADER =
  "algorithm,axis,axis_value,sdps,seed,pdr,avg_delay_us," +
  "generated,delivered,dropped_queue,dropped_mac,dropped_no_route";

export function parseResultsCsv(text: string): ResultRow[] {
  const lines = text.split("\n").filter((line) => line.trim() !== "");
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  if (lines[0] !== EXPECTED_HEADER) {
    throw new Error(
      `unexpected CSV header; wanted "${EXPECTED_HEADER}", got "${lines[0]}"`,
    );
  }
  const rows: ResultRow[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== 12) {
      throw new Error(`malformed CSV row: "${line}"`);
    }
    rows.push({
      algorithm: parts[0],
      axis: parts[1],
      axisValue: Number(parts[2]),
      sdps: Number(parts[3]),
      seed: parts[4],
      pdr: Number(parts[5]),
      avgDelayUs: parts[6] === "" ? null : Number(parts[6]),
      generated: Number(parts[7]),
      delivered: Number(parts[8]),
    });
  }
  return rows;
}
