// Side-by-side comparison: the initial target state next to the assessed
// outcome, with the drift table underneath. Everything on screen comes
// from the three API payloads passed in.

import { PicturePanel, renderDeltaTable } from './picture';
import type { ChartModel, DeltaReportModel } from './types';

export function renderComparison(
  target: ChartModel,
  outcome: ChartModel,
  delta: DeltaReportModel,
): HTMLElement {
  const root = document.createElement('section');
  root.className = 'picture-comparison';

  const row = document.createElement('div');
  row.className = 'comparison-row';

  const targetSide = document.createElement('div');
  targetSide.className = 'comparison-side target-side';
  const targetTitle = document.createElement('h3');
  targetTitle.textContent = `target state (round ${target.round_ref})`;
  const targetPanel = new PicturePanel();
  targetPanel.show(target);
  targetSide.append(targetTitle, targetPanel.root);

  const outcomeSide = document.createElement('div');
  outcomeSide.className = 'comparison-side outcome-side';
  const outcomeTitle = document.createElement('h3');
  outcomeTitle.textContent = `outcome (round ${outcome.round_ref})`;
  const outcomePanel = new PicturePanel();
  outcomePanel.show(outcome);
  outcomeSide.append(outcomeTitle, outcomePanel.root);

  row.append(targetSide, outcomeSide);

  const deltaTitle = document.createElement('h3');
  deltaTitle.textContent =
    `changes since the target state` +
    (delta.trigger_description ? ` (trigger: ${delta.trigger_description})` : '');

  root.append(row, deltaTitle, renderDeltaTable(delta));

  const rationales = Object.entries(delta.rationales);
  if (rationales.length > 0) {
    const list = document.createElement('ul');
    list.className = 'rationales';
    for (const [sid, why] of rationales) {
      const item = document.createElement('li');
      item.textContent = `${sid}: ${why}`;
      list.append(item);
    }
    root.append(list);
  }
  return root;
}
