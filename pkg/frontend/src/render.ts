// SVG + DOM rendering of chart models. All values come from the model;
// nothing is recomputed here beyond coordinate geometry.

import type { ChartModel, ComparisonModel, Wedge } from './model.js';
import type { Explanations } from './api.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

// ring radii in viewbox units; the outer ring is wider than the inner one
const OUTER_R = [64, 100] as const;
const INNER_R = [38, 60] as const;

function polar(cx: number, cy: number, r: number, angleDeg: number): [number, number] {
  // model angles are clockwise from 12 o'clock
  const rad = ((angleDeg - 90) * Math.PI) / 180;
  return [cx + r * Math.cos(rad), cy + r * Math.sin(rad)];
}

function annularSectorPath(
  cx: number,
  cy: number,
  r0: number,
  r1: number,
  start: number,
  end: number,
): string {
  // cap at a hair under a full turn so a 100% wedge still draws
  const sweep = Math.min(end - start, 359.999);
  const endAngle = start + sweep;
  const large = sweep > 180 ? 1 : 0;
  const [x0, y0] = polar(cx, cy, r1, start);
  const [x1, y1] = polar(cx, cy, r1, endAngle);
  const [x2, y2] = polar(cx, cy, r0, endAngle);
  const [x3, y3] = polar(cx, cy, r0, start);
  return (
    `M ${x0.toFixed(3)} ${y0.toFixed(3)} ` +
    `A ${r1} ${r1} 0 ${large} 1 ${x1.toFixed(3)} ${y1.toFixed(3)} ` +
    `L ${x2.toFixed(3)} ${y2.toFixed(3)} ` +
    `A ${r0} ${r0} 0 ${large} 0 ${x3.toFixed(3)} ${y3.toFixed(3)} Z`
  );
}

let tooltipEl: HTMLDivElement | null = null;

function tooltip(): HTMLDivElement {
  if (!tooltipEl) {
    tooltipEl = document.createElement('div');
    tooltipEl.className = 'tooltip';
    tooltipEl.style.display = 'none';
    document.body.appendChild(tooltipEl);
  }
  return tooltipEl;
}

function attachHover(path: SVGPathElement, wedge: Wedge): void {
  path.addEventListener('mousemove', (ev) => {
    const tip = tooltip();
    tip.textContent = wedge.tooltip;
    tip.style.display = 'block';
    tip.style.left = `${ev.pageX + 12}px`;
    tip.style.top = `${ev.pageY + 12}px`;
  });
  path.addEventListener('mouseleave', () => {
    tooltip().style.display = 'none';
  });
}

function infoIcon(text: string): HTMLSpanElement {
  const icon = document.createElement('span');
  icon.className = 'info-icon';
  icon.textContent = 'ⓘ';
  icon.title = 'What does this mean?';
  icon.addEventListener('click', () => {
    const existing = document.querySelector('.explain-popup');
    if (existing) existing.remove();
    const popup = document.createElement('div');
    popup.className = 'explain-popup';
    const body = document.createElement('p');
    body.textContent = text;
    const close = document.createElement('button');
    close.textContent = 'Close';
    close.addEventListener('click', () => popup.remove());
    popup.append(body, close);
    document.body.appendChild(popup);
  });
  return icon;
}

export function renderFilm(
  model: ChartModel,
  explanations: Explanations,
): HTMLDivElement {
  const card = document.createElement('div');
  card.className = 'film-card';

  const title = document.createElement('h2');
  title.textContent = model.filmId;
  card.appendChild(title);

  const subtitle = document.createElement('p');
  subtitle.className = 'subtitle';
  subtitle.textContent =
    `AI-generated distribution of on-screen appearances (${model.nFaces.toLocaleString()} faces)`;
  card.appendChild(subtitle);

  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', '0 0 220 220');
  svg.setAttribute('class', 'doughnut');
  const cx = 110;
  const cy = 110;
  for (const w of model.wedges) {
    const [r0, r1] = w.ring === 'outer' ? OUTER_R : INNER_R;
    const path = document.createElementNS(SVG_NS, 'path');
    path.setAttribute('d', annularSectorPath(cx, cy, r0, r1, w.startAngle, w.endAngle));
    path.setAttribute('fill', w.color);
    path.setAttribute('stroke', '#ffffff');
    path.setAttribute('stroke-width', '1');
    path.setAttribute('data-wedge', w.key);
    attachHover(path as unknown as SVGPathElement, w);
    svg.appendChild(path);
  }
  model.centerLines.forEach((line, i) => {
    const text = document.createElementNS(SVG_NS, 'text');
    text.setAttribute('x', String(cx));
    text.setAttribute('y', String(cy - 4 + i * 18));
    text.setAttribute('text-anchor', 'middle');
    text.setAttribute('class', 'center-text');
    text.setAttribute('fill', line.color);
    text.textContent = line.text;
    svg.appendChild(text);
  });
  card.appendChild(svg);

  const confidence = document.createElement('p');
  confidence.className = 'confidence-line';
  confidence.textContent = model.confidenceLine + ' ';
  confidence.appendChild(infoIcon(explanations.confidence));
  card.appendChild(confidence);

  if (model.legend) {
    const legend = document.createElement('div');
    legend.className = 'legend';
    for (const entry of model.legend) {
      const item = document.createElement('span');
      item.className = 'legend-item';
      const chip = document.createElement('span');
      chip.className = 'legend-chip';
      chip.style.background = entry.color;
      item.append(chip, document.createTextNode(entry.label));
      legend.appendChild(item);
    }
    card.appendChild(legend);
  }

  const biasHeading = document.createElement('p');
  biasHeading.className = 'bias-heading';
  biasHeading.textContent = 'AI bias on the validation set ';
  biasHeading.appendChild(infoIcon(explanations.bias));
  card.appendChild(biasHeading);

  const bars = document.createElement('div');
  bars.className = 'bias-bars';
  for (const pair of model.biasBars) {
    const group = document.createElement('div');
    group.className = 'bias-group';
    const label = document.createElement('div');
    label.className = 'bias-label';
    label.textContent = pair.label;
    group.appendChild(label);
    for (const [rowLabel, value] of [
      ['actual', pair.actual],
      ['AI-predicted', pair.predicted],
    ] as const) {
      const row = document.createElement('div');
      row.className = 'bias-row';
      const name = document.createElement('span');
      name.className = 'bias-row-label';
      name.textContent = rowLabel;
      const track = document.createElement('span');
      track.className = 'bias-track';
      const fill = document.createElement('span');
      fill.className = 'bias-fill';
      fill.style.width = `${value}%`;
      fill.style.background = rowLabel === 'actual' ? pair.color : '#8899aa';
      track.appendChild(fill);
      const num = document.createElement('span');
      num.className = 'bias-value';
      num.textContent = `${value.toFixed(2)}%`;
      row.append(name, track, num);
      group.appendChild(row);
    }
    bars.appendChild(group);
  }
  card.appendChild(bars);
  return card;
}

export function renderErrorPanel(filmId: string, errors: string[]): HTMLDivElement {
  const panel = document.createElement('div');
  panel.className = 'error-panel';
  const heading = document.createElement('h2');
  heading.textContent = `Cannot render ${filmId}`;
  panel.appendChild(heading);
  const list = document.createElement('ul');
  for (const err of errors) {
    const item = document.createElement('li');
    item.textContent = err;
    list.appendChild(item);
  }
  panel.appendChild(list);
  return panel;
}

export function renderComparison(
  comparison: ComparisonModel,
  explanations: Explanations,
): HTMLDivElement {
  const row = document.createElement('div');
  row.className = 'comparison-row';
  if (comparison.emptyMessage) {
    const msg = document.createElement('p');
    msg.className = 'empty-state';
    msg.textContent = comparison.emptyMessage;
    row.appendChild(msg);
    return row;
  }
  if (comparison.limitMessage) {
    const msg = document.createElement('p');
    msg.className = 'limit-message';
    msg.textContent = comparison.limitMessage;
    row.appendChild(msg);
    return row;
  }
  for (const chart of comparison.charts) {
    row.appendChild(renderFilm(chart, explanations));
  }
  return row;
}
