// Chart model for the nested-doughnut film view.
//
// Everything here is pure data -> data so the geometry, labels and
// tooltip texts are testable without a DOM. Angles are degrees measured
// clockwise from 12 o'clock. Tooltip percentages are read from the
// document verbatim (display rounding to 2 decimals only); the center
// headline rounds half-up to whole percents.

export interface GenderSection {
  female_pct: number;
  male_pct: number;
  confidence_pct: number;
}

export interface AgeSection {
  over50_pct: number;
  upto50_pct: number;
  confidence_pct: number;
}

export interface IntersectionSection {
  female_over50_pct: number;
  female_upto50_pct: number;
  male_over50_pct: number;
  male_upto50_pct: number;
}

export interface SharePair {
  actual: Record<string, number>;
  predicted: Record<string, number>;
}

export interface BiasSection {
  validation_set: string;
  gender: SharePair;
  age: SharePair;
}

export interface FilmDocument {
  schema_version: number;
  film_id: string;
  n_faces: number;
  gender: GenderSection;
  age: AgeSection;
  intersection: IntersectionSection;
  bias: BiasSection;
  config_fingerprint: string;
}

export interface Wedge {
  key: string;
  ring: 'outer' | 'inner';
  label: string;
  /** exact percentage from the document */
  value: number;
  startAngle: number;
  endAngle: number;
  color: string;
  highlighted: boolean;
  tooltip: string;
}

export interface CenterLine {
  text: string;
  color: string;
}

export interface BiasBarPair {
  label: string;
  actual: number;
  predicted: number;
  color: string;
}

export interface ChartModel {
  filmId: string;
  nFaces: number;
  wedges: Wedge[];
  centerLines: CenterLine[];
  confidenceLine: string;
  biasBars: BiasBarPair[];
  legend: { label: string; color: string }[] | null;
}

export interface ViewerOptions {
  /** give each gender x age intersection its own color (default: single-hue) */
  distinctIntersectionColors?: boolean;
  /** show a wedge legend under the chart (default: off, hover reveals labels) */
  showLegend?: boolean;
}

export const FEMALE_COLOR = '#e8833a';
export const MALE_GRAY = '#c9c9c9';
export const OVER50_COLOR = '#3a9e5f';
export const UPTO50_GRAY = '#e3e3e3';

const DISTINCT_PALETTE: Record<string, string> = {
  female_over50: '#2e7d4f',
  female_upto50: '#e8833a',
  male_over50: '#56b4e9',
  male_upto50: '#8d99ae',
};

export const COMPARISON_LIMIT = 4;

export function roundHalfUp(x: number): number {
  return Math.floor(x + 0.5);
}

export function formatPct(x: number): string {
  return `${x.toFixed(2)}%`;
}

/** Field-naming validation so broken documents render an error panel. */
export function validateDocument(doc: unknown): string[] {
  const errors: string[] = [];
  const d = doc as Partial<FilmDocument> | null;
  if (!d || typeof d !== 'object') return ['document: not an object'];
  if (d.schema_version !== 1) errors.push('schema_version: expected 1');
  if (typeof d.film_id !== 'string' || !d.film_id) errors.push('film_id: missing');
  if (typeof d.n_faces !== 'number' || d.n_faces < 1) errors.push('n_faces: missing or < 1');

  const pctFields: [string, unknown][] = [
    ['gender.female_pct', d.gender?.female_pct],
    ['gender.male_pct', d.gender?.male_pct],
    ['gender.confidence_pct', d.gender?.confidence_pct],
    ['age.over50_pct', d.age?.over50_pct],
    ['age.upto50_pct', d.age?.upto50_pct],
    ['age.confidence_pct', d.age?.confidence_pct],
    ['intersection.female_over50_pct', d.intersection?.female_over50_pct],
    ['intersection.female_upto50_pct', d.intersection?.female_upto50_pct],
    ['intersection.male_over50_pct', d.intersection?.male_over50_pct],
    ['intersection.male_upto50_pct', d.intersection?.male_upto50_pct],
  ];
  for (const [name, value] of pctFields) {
    if (typeof value !== 'number' || !isFinite(value) || value < 0 || value > 100) {
      errors.push(`${name}: missing or outside [0, 100]`);
    }
  }
  if (errors.length) return errors;

  const g = d.gender as GenderSection;
  const a = d.age as AgeSection;
  const inter = d.intersection as IntersectionSection;
  const close = (x: number, y: number) => Math.abs(x - y) <= 0.05;
  if (!close(g.female_pct + g.male_pct, 100)) {
    errors.push('gender: female_pct + male_pct must total 100');
  }
  if (!close(a.over50_pct + a.upto50_pct, 100)) {
    errors.push('age: over50_pct + upto50_pct must total 100');
  }
  if (!close(inter.female_over50_pct + inter.female_upto50_pct, g.female_pct)) {
    errors.push('intersection: female wedges must total gender.female_pct');
  }
  if (!close(inter.male_over50_pct + inter.male_upto50_pct, g.male_pct)) {
    errors.push('intersection: male wedges must total gender.male_pct');
  }
  if (!d.bias || !d.bias.gender || !d.bias.age) {
    errors.push('bias: missing gender/age sections');
  }
  return errors;
}

function wedge(
  key: string,
  ring: 'outer' | 'inner',
  label: string,
  value: number,
  start: number,
  color: string,
  highlighted: boolean,
): Wedge {
  return {
    key,
    ring,
    label,
    value,
    startAngle: start,
    endAngle: start + 3.6 * value,
    color,
    highlighted,
    tooltip: `${label}: ${formatPct(value)} of on-screen appearances`,
  };
}

export function buildChartModel(doc: FilmDocument, options: ViewerOptions = {}): ChartModel {
  const { gender, age, intersection } = doc;
  const distinct = options.distinctIntersectionColors === true;

  const innerColor = (key: keyof typeof DISTINCT_PALETTE, over50: boolean) =>
    distinct ? DISTINCT_PALETTE[key] : over50 ? OVER50_COLOR : UPTO50_GRAY;

  const wedges: Wedge[] = [];
  // outer ring: Female then Male, starting at 12 o'clock
  wedges.push(wedge('female', 'outer', 'Female', gender.female_pct, 0, FEMALE_COLOR, true));
  wedges.push(
    wedge('male', 'outer', 'Male', gender.male_pct, 3.6 * gender.female_pct, MALE_GRAY, false),
  );
  // inner ring: each gender's wedges nest inside that gender's outer span
  let cursor = 0;
  const innerOrder: [keyof typeof DISTINCT_PALETTE, string, number, boolean][] = [
    ['female_over50', 'Female · Over 50', intersection.female_over50_pct, true],
    ['female_upto50', 'Female · Up to 50', intersection.female_upto50_pct, false],
    ['male_over50', 'Male · Over 50', intersection.male_over50_pct, true],
    ['male_upto50', 'Male · Up to 50', intersection.male_upto50_pct, false],
  ];
  for (const [key, label, value, over50] of innerOrder) {
    wedges.push(
      wedge(key, 'inner', label, value, cursor, innerColor(key, over50), !distinct && over50),
    );
    cursor += 3.6 * value;
  }

  const model: ChartModel = {
    filmId: doc.film_id,
    nFaces: doc.n_faces,
    wedges,
    centerLines: [
      { text: `Female ${roundHalfUp(gender.female_pct)}%`, color: FEMALE_COLOR },
      { text: `Over 50's ${roundHalfUp(age.over50_pct)}%`, color: OVER50_COLOR },
    ],
    confidenceLine:
      `AI confidence - gender: ${roundHalfUp(gender.confidence_pct)}%, ` +
      `age: ${roundHalfUp(age.confidence_pct)}%`,
    biasBars: [
      {
        label: 'Female',
        actual: doc.bias.gender.actual.female_pct,
        predicted: doc.bias.gender.predicted.female_pct,
        color: FEMALE_COLOR,
      },
      {
        label: 'Over 50',
        actual: doc.bias.age.actual.over50_pct,
        predicted: doc.bias.age.predicted.over50_pct,
        color: OVER50_COLOR,
      },
    ],
    legend: options.showLegend
      ? innerOrder.map(([key, label, , over50]) => ({
          label,
          color: innerColor(key, over50),
        }))
      : null,
  };
  return model;
}

export interface ComparisonModel {
  charts: ChartModel[];
  emptyMessage: string | null;
  limitMessage: string | null;
}

/** Side-by-side charts for 1..4 films, in the order given. */
export function buildComparison(
  docs: FilmDocument[],
  options: ViewerOptions = {},
): ComparisonModel {
  if (docs.length === 0) {
    return { charts: [], emptyMessage: 'No films selected.', limitMessage: null };
  }
  if (docs.length > COMPARISON_LIMIT) {
    return {
      charts: [],
      emptyMessage: null,
      limitMessage: `At most ${COMPARISON_LIMIT} films can be compared at once (got ${docs.length}).`,
    };
  }
  return {
    charts: docs.map((doc) => buildChartModel(doc, options)),
    emptyMessage: null,
    limitMessage: null,
  };
}

/** Sum of outer-ring angles in degrees (invariant: 360 within 0.1). */
export function outerAngleSum(model: ChartModel): number {
  return model.wedges
    .filter((w) => w.ring === 'outer')
    .reduce((acc, w) => acc + (w.endAngle - w.startAngle), 0);
}

export function innerAngleSum(model: ChartModel): number {
  return model.wedges
    .filter((w) => w.ring === 'inner')
    .reduce((acc, w) => acc + (w.endAngle - w.startAngle), 0);
}
