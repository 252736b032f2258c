import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import { renderComparison } from '../src/comparison';
import { PALETTE } from '../src/picture';
import type { ChartModel, DeltaReportModel } from '../src/types';

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), '..', 'fixtures');

const target = JSON.parse(readFileSync(join(FIXTURES, 'target.json'), 'utf-8')) as ChartModel;
const outcome = JSON.parse(readFileSync(join(FIXTURES, 'outcome.json'), 'utf-8')) as ChartModel;
const delta = JSON.parse(readFileSync(join(FIXTURES, 'delta.json'), 'utf-8')) as DeltaReportModel;

describe('side-by-side comparison', () => {
  it('shows the target and outcome charts together with the delta table', () => {
    const view = renderComparison(target, outcome, delta);
    const sides = view.querySelectorAll('.comparison-side');
    expect(sides).toHaveLength(2);

    const targetBubbles = sides[0].querySelectorAll('circle.bubble');
    const outcomeBubbles = sides[1].querySelectorAll('circle.bubble');
    expect(targetBubbles).toHaveLength(21);
    expect(outcomeBubbles).toHaveLength(21);
    // target side is all gray; outcome side carries assessment colors
    expect(
      new Set([...targetBubbles].map((c) => c.getAttribute('fill'))),
    ).toEqual(new Set([PALETTE.gray]));
    expect(
      new Set([...outcomeBubbles].map((c) => c.getAttribute('fill'))).size,
    ).toBeGreaterThan(1);

    expect(view.querySelectorAll('.delta-table tbody tr')).toHaveLength(delta.rows.length);
  });

  it('surfaces the trigger description behind the drift', () => {
    const view = renderComparison(target, outcome, delta);
    const heading = [...view.querySelectorAll('h3')].map((h) => h.textContent).join(' ');
    expect(heading).toContain(delta.trigger_description!);
  });
});
