// Situational picture panel: renders the server's JSON chart model with
// the same encodings as the exported SVG (position, color, size, or the
// ghost-connector alternative). The panel computes nothing itself; it
// only maps the model's values onto pixels.

import type { BubbleModel, BubbleSize, ChartModel, DeltaReportModel } from './types';

export const PALETTE: Record<string, string> = {
  green: '#2e9e4f',
  yellow: '#e8c531',
  red: '#d64541',
  gray: '#9aa0a6',
};

export const RADII: Record<BubbleSize, number> = { small: 8, medium: 14, large: 22 };

const SVG_NS = 'http://www.w3.org/2000/svg';

export interface PanelGeometry {
  width: number;
  height: number;
  marginLeft: number;
  marginRight: number;
  marginTop: number;
  marginBottom: number;
}

export const DEFAULT_GEOMETRY: PanelGeometry = {
  width: 1000,
  height: 700,
  marginLeft: 90,
  marginRight: 40,
  marginTop: 60,
  marginBottom: 90,
};

export type PanelMode = 'size' | 'connector';

export class PicturePanel {
  readonly root: HTMLElement;
  private model: ChartModel | null = null;
  private mode: PanelMode = 'size';
  private chartHost: HTMLElement;
  private infoEl: HTMLElement;
  private toggleBtn: HTMLButtonElement;

  constructor(private geometry: PanelGeometry = DEFAULT_GEOMETRY) {
    this.root = document.createElement('section');
    this.root.className = 'picture-panel';

    this.toggleBtn = document.createElement('button');
    this.toggleBtn.type = 'button';
    this.toggleBtn.className = 'mode-toggle';
    this.toggleBtn.textContent = 'show initial-state connectors';
    this.toggleBtn.addEventListener('click', () => {
      this.setMode(this.mode === 'size' ? 'connector' : 'size');
    });

    this.chartHost = document.createElement('div');
    this.chartHost.className = 'chart-host';
    this.infoEl = document.createElement('p');
    this.infoEl.className = 'bubble-info';
    this.infoEl.textContent = 'no picture yet';

    this.root.append(this.toggleBtn, this.chartHost, this.infoEl);
  }

  /** The chart model currently on screen, exactly as received. */
  get currentModel(): ChartModel | null {
    return this.model;
  }

  setMode(mode: PanelMode) {
    this.mode = mode;
    this.toggleBtn.textContent =
      mode === 'size' ? 'show initial-state connectors' : 'show size coding';
    if (this.model) this.draw();
  }

  show(model: ChartModel) {
    this.model = model;
    this.infoEl.textContent = 'hover a bubble for details';
    this.draw();
  }

  showEmpty(message: string) {
    this.model = null;
    this.chartHost.replaceChildren();
    this.infoEl.textContent = message;
  }

  hoverText(bubble: BubbleModel): string {
    const coverage = bubble.stats.coverage_avg ?? 'not assessed';
    return (
      `${bubble.label} ${bubble.name}: ${bubble.stats.total_tokens} tokens, ` +
      `median ${bubble.stats.median_tokens}, ${bubble.stats.deviation_count} deviations, ` +
      `coverage ${coverage}`
    );
  }

  private px(x: number): number {
    const g = this.geometry;
    return g.marginLeft + x * (g.width - g.marginLeft - g.marginRight);
  }

  private py(y: number): number {
    const g = this.geometry;
    return g.marginTop + (1 - y) * (g.height - g.marginTop - g.marginBottom);
  }

  private draw() {
    const model = this.model!;
    const g = this.geometry;
    const svg = document.createElementNS(SVG_NS, 'svg');
    svg.setAttribute('viewBox', `0 0 ${g.width} ${g.height}`);
    svg.setAttribute('width', String(g.width));
    svg.setAttribute('height', String(g.height));

    const frame = document.createElementNS(SVG_NS, 'rect');
    frame.setAttribute('x', String(g.marginLeft));
    frame.setAttribute('y', String(g.marginTop));
    frame.setAttribute('width', String(g.width - g.marginLeft - g.marginRight));
    frame.setAttribute('height', String(g.height - g.marginTop - g.marginBottom));
    frame.setAttribute('fill', 'none');
    frame.setAttribute('stroke', '#444444');
    svg.append(frame);

    const xTitle = document.createElementNS(SVG_NS, 'text');
    xTitle.setAttribute('x', String(g.width / 2));
    xTitle.setAttribute('y', String(g.height - 18));
    xTitle.setAttribute('text-anchor', 'middle');
    xTitle.textContent = 'perceived relevance';
    const yTitle = document.createElementNS(SVG_NS, 'text');
    yTitle.setAttribute('x', '22');
    yTitle.setAttribute('y', String(g.height / 2));
    yTitle.setAttribute('text-anchor', 'middle');
    yTitle.setAttribute('transform', `rotate(-90 22 ${g.height / 2})`);
    yTitle.textContent = 'valuation consensus';
    svg.append(xTitle, yTitle);

    const ordered = [...model.bubbles].sort((a, b) => a.card_id - b.card_id);

    if (this.mode === 'connector') {
      for (const bubble of ordered) {
        if (!bubble.ghost) continue;
        const line = document.createElementNS(SVG_NS, 'line');
        line.setAttribute('x1', String(this.px(bubble.ghost.x_display)));
        line.setAttribute('y1', String(this.py(bubble.ghost.y_display)));
        line.setAttribute('x2', String(this.px(bubble.x_display)));
        line.setAttribute('y2', String(this.py(bubble.y_display)));
        line.setAttribute('stroke', '#888888');
        line.setAttribute('stroke-dasharray', '4 3');
        line.setAttribute('class', 'connector');
        line.setAttribute('data-card', String(bubble.card_id));
        svg.append(line);
        const ghost = document.createElementNS(SVG_NS, 'circle');
        ghost.setAttribute('cx', String(this.px(bubble.ghost.x_display)));
        ghost.setAttribute('cy', String(this.py(bubble.ghost.y_display)));
        ghost.setAttribute('r', String(RADII.medium));
        ghost.setAttribute('fill', PALETTE.gray);
        ghost.setAttribute('fill-opacity', '0.55');
        ghost.setAttribute('class', 'ghost');
        ghost.setAttribute('data-card', String(bubble.card_id));
        svg.append(ghost);
      }
    }

    for (const bubble of ordered) {
      const circle = document.createElementNS(SVG_NS, 'circle');
      circle.setAttribute('cx', String(this.px(bubble.x_display)));
      circle.setAttribute('cy', String(this.py(bubble.y_display)));
      const radius = this.mode === 'connector' ? RADII.medium : RADII[bubble.size];
      circle.setAttribute('r', String(radius));
      circle.setAttribute('fill', PALETTE[bubble.color]);
      circle.setAttribute('fill-opacity', '0.85');
      circle.setAttribute('stroke', '#333333');
      circle.setAttribute('class', 'bubble');
      circle.setAttribute('data-card', String(bubble.card_id));
      const title = document.createElementNS(SVG_NS, 'title');
      title.textContent = this.hoverText(bubble);
      circle.append(title);
      circle.addEventListener('mouseover', () => {
        this.infoEl.textContent = this.hoverText(bubble);
      });
      svg.append(circle);

      const label = document.createElementNS(SVG_NS, 'text');
      label.setAttribute('x', String(this.px(bubble.x_display)));
      label.setAttribute('y', String(this.py(bubble.y_display) + 4));
      label.setAttribute('text-anchor', 'middle');
      label.setAttribute('data-card', String(bubble.card_id));
      label.textContent = bubble.label;
      svg.append(label);
    }

    this.chartHost.replaceChildren(svg);
  }
}

export function renderDeltaTable(report: DeltaReportModel): HTMLTableElement {
  const table = document.createElement('table');
  table.className = 'delta-table';
  const head = table.createTHead().insertRow();
  for (const caption of ['card', 'name', 'baseline', 'current', 'delta', 'size']) {
    const th = document.createElement('th');
    th.textContent = caption;
    head.append(th);
  }
  const body = table.createTBody();
  for (const row of report.rows) {
    const tr = body.insertRow();
    tr.dataset.cardId = String(row.card_id);
    tr.insertCell().textContent = row.label;
    tr.insertCell().textContent = row.name;
    tr.insertCell().textContent = String(row.baseline_total);
    tr.insertCell().textContent = String(row.current_total);
    tr.insertCell().textContent = (row.total_delta >= 0 ? '+' : '') + String(row.total_delta);
    tr.insertCell().textContent = row.size_code;
  }
  return table;
}
