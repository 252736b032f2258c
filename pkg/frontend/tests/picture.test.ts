import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import { DEFAULT_GEOMETRY, PALETTE, PicturePanel, RADII, renderDeltaTable } from '../src/picture';
import type { ChartModel, DeltaReportModel } from '../src/types';

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), '..', 'fixtures');

function loadModel(name: string): ChartModel {
  return JSON.parse(readFileSync(join(FIXTURES, name), 'utf-8')) as ChartModel;
}

const outcome = loadModel('outcome.json');
const target = loadModel('target.json');
const delta = JSON.parse(readFileSync(join(FIXTURES, 'delta.json'), 'utf-8')) as DeltaReportModel;

describe('PicturePanel encoding agreement', () => {
  it('consumes the exported chart model verbatim, field for field', () => {
    const panel = new PicturePanel();
    panel.show(outcome);
    // the panel must not mutate or re-derive anything: the model it holds
    // is exactly the exported chart-model JSON
    expect(panel.currentModel).toEqual(loadModel('outcome.json'));
  });

  it('fixtures match the backend golden exports byte-for-byte content', () => {
    // guards fixture drift: the recorded fixture is the actual export
    const goldenDir = join(FIXTURES, '..', '..', 'scenario', 'golden');
    const golden = JSON.parse(readFileSync(join(goldenDir, 'outcome.json'), 'utf-8'));
    expect(loadModel('outcome.json')).toEqual(golden);
    const goldenTarget = JSON.parse(readFileSync(join(goldenDir, 'target.json'), 'utf-8'));
    expect(loadModel('target.json')).toEqual(goldenTarget);
  });

  it('renders one bubble per card with the model color and size encodings', () => {
    const panel = new PicturePanel();
    panel.show(outcome);
    const circles = panel.root.querySelectorAll('circle.bubble');
    expect(circles).toHaveLength(21);
    for (const bubble of outcome.bubbles) {
      const circle = panel.root.querySelector(
        `circle.bubble[data-card="${bubble.card_id}"]`,
      ) as SVGCircleElement;
      expect(circle.getAttribute('fill')).toBe(PALETTE[bubble.color]);
      expect(circle.getAttribute('r')).toBe(String(RADII[bubble.size]));

      const g = DEFAULT_GEOMETRY;
      const plotW = g.width - g.marginLeft - g.marginRight;
      const plotH = g.height - g.marginTop - g.marginBottom;
      expect(Number(circle.getAttribute('cx'))).toBeCloseTo(
        g.marginLeft + bubble.x_display * plotW,
        6,
      );
      expect(Number(circle.getAttribute('cy'))).toBeCloseTo(
        g.marginTop + (1 - bubble.y_display) * plotH,
        6,
      );
    }
  });

  it('labels every bubble with its #id', () => {
    const panel = new PicturePanel();
    panel.show(outcome);
    for (const bubble of outcome.bubbles) {
      const label = panel.root.querySelector(`text[data-card="${bubble.card_id}"]`);
      expect(label?.textContent).toBe(bubble.label);
    }
  });

  it('target-state model renders all gray', () => {
    const panel = new PicturePanel();
    panel.show(target);
    const fills = [...panel.root.querySelectorAll('circle.bubble')].map((c) =>
      c.getAttribute('fill'),
    );
    expect(new Set(fills)).toEqual(new Set([PALETTE.gray]));
  });

  it('connector toggle draws gray ghosts with one line per card', () => {
    const panel = new PicturePanel();
    panel.show(outcome);
    expect(panel.root.querySelectorAll('line.connector')).toHaveLength(0);
    (panel.root.querySelector('.mode-toggle') as HTMLButtonElement).click();
    expect(panel.root.querySelectorAll('line.connector')).toHaveLength(21);
    expect(panel.root.querySelectorAll('circle.ghost')).toHaveLength(21);
    // connector mode replaces size coding with uniform medium bubbles
    const radii = new Set(
      [...panel.root.querySelectorAll('circle.bubble')].map((c) => c.getAttribute('r')),
    );
    expect(radii).toEqual(new Set([String(RADII.medium)]));
  });

  it('hover surfaces name, totals, harmony and coverage from the model only', () => {
    const panel = new PicturePanel();
    panel.show(outcome);
    const bubble8 = outcome.bubbles.find((b) => b.card_id === 8)!;
    const circle = panel.root.querySelector('circle.bubble[data-card="8"]') as SVGCircleElement;
    circle.dispatchEvent(new Event('mouseover'));
    const info = panel.root.querySelector('.bubble-info')!.textContent!;
    expect(info).toContain(bubble8.name);
    expect(info).toContain(`${bubble8.stats.total_tokens} tokens`);
    expect(info).toContain(`median ${bubble8.stats.median_tokens}`);
    expect(info).toContain(`${bubble8.stats.deviation_count} deviations`);
    expect(info).toContain(`coverage ${bubble8.stats.coverage_avg}`);
  });

  it('shows an empty-state message when no picture exists yet', () => {
    const panel = new PicturePanel();
    panel.showEmpty('no picture yet');
    expect(panel.root.querySelector('.bubble-info')!.textContent).toBe('no picture yet');
    expect(panel.root.querySelectorAll('circle')).toHaveLength(0);
  });
});

describe('delta table', () => {
  it('renders one row per card straight from the report', () => {
    const table = renderDeltaTable(delta);
    const rows = table.tBodies[0].rows;
    expect(rows).toHaveLength(delta.rows.length);
    const row8 = [...rows].find((r) => r.dataset.cardId === '8')!;
    const model8 = delta.rows.find((r) => r.card_id === 8)!;
    expect(row8.cells[2].textContent).toBe(String(model8.baseline_total));
    expect(row8.cells[3].textContent).toBe(String(model8.current_total));
    expect(row8.cells[5].textContent).toBe(model8.size_code);
  });
});
