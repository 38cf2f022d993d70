/** Parsing of the harness's aggregate metric CSVs.
 *
 * Format: optional leading `# key=value` comment lines, then a header row
 * `iteration,<metric>_mean,<metric>_std,...,runs,algorithm,fidelity_mode`,
 * then one numeric row per iteration. No quoting, floats repr-exact.
 */

export const METRICS = [
  "regret",
  "cum_regret",
  "mse",
  "max_var",
  "mean_distance",
] as const;

export type MetricName = (typeof METRICS)[number];

export interface AggregateRow {
  iteration: number;
  mean: Record<MetricName, number>;
  std: Record<MetricName, number>;
}

export interface AggregateSeries {
  algorithm: string;
  fidelityMode: string;
  runs: number;
  masterSeed: string | null;
  rows: AggregateRow[];
}

export class CsvFormatError extends Error {}

export function parseAggregateCsv(text: string, source = "<csv>"): AggregateSeries {
  const lines = text.split("\n").filter((l) => l.length > 0);
  let masterSeed: string | null = null;
  let headerIdx = 0;
  while (headerIdx < lines.length && lines[headerIdx].startsWith("#")) {
    const m = lines[headerIdx].match(/master_seed=(\S+)/);
    if (m) masterSeed = m[1];
    headerIdx += 1;
  }
  if (headerIdx >= lines.length) {
    throw new CsvFormatError(`${source}: no header row`);
  }
  const header = lines[headerIdx].split(",");
  const col = (name: string): number => {
    const idx = header.indexOf(name);
    if (idx < 0) throw new CsvFormatError(`${source}: missing column ${name}`);
    return idx;
  };

  const iterationCol = col("iteration");
  const runsCol = col("runs");
  const algorithmCol = col("algorithm");
  const modeCol = col("fidelity_mode");
  const meanCols = Object.fromEntries(METRICS.map((m) => [m, col(`${m}_mean`)]));
  const stdCols = Object.fromEntries(METRICS.map((m) => [m, col(`${m}_std`)]));

  const rows: AggregateRow[] = [];
  let algorithm = "";
  let fidelityMode = "";
  let runs = 0;
  for (let i = headerIdx + 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new CsvFormatError(
        `${source}:${i + 1}: expected ${header.length} fields, got ${parts.length}`,
      );
    }
    const mean = {} as Record<MetricName, number>;
    const std = {} as Record<MetricName, number>;
    for (const m of METRICS) {
      mean[m] = Number(parts[meanCols[m]]);
      std[m] = Number(parts[stdCols[m]]);
    }
    rows.push({ iteration: Number(parts[iterationCol]), mean, std });
    algorithm = parts[algorithmCol];
    fidelityMode = parts[modeCol];
    runs = Number(parts[runsCol]);
  }
  if (rows.length === 0) {
    throw new CsvFormatError(`${source}: no data rows`);
  }
  return { algorithm, fidelityMode, runs, masterSeed, rows };
}
