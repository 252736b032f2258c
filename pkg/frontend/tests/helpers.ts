import type { CardInfo, SessionView } from '../src/types';

export function tinyDeck(): CardInfo[] {
  return [
    { card_id: 1, name: 'Stakeholder Analysis', theme: 'analyze' },
    { card_id: 2, name: 'Data Quality', theme: 'data' },
    { card_id: 3, name: 'Explainability', theme: 'transparency' },
  ];
}

export function makeView(overrides: Partial<SessionView> = {}): SessionView {
  const cards = tinyDeck();
  return {
    session_id: 'test-session',
    phase: 'setup',
    token_budget: cards.length,
    deck: { cards, token_budget: cards.length },
    stakeholders: [
      {
        stakeholder_id: 's1',
        display_name: 'Person 1',
        role_label: 'member',
        required: true,
        facilitator: false,
      },
    ],
    rounds: [
      { round_index: 0, status: 'open', trigger_ref: null, submitted: [], awaiting: ['s1'] },
    ],
    open_round: 0,
    baseline_picture_id: null,
    has_outcome_picture: false,
    pending_scores_from: [],
    awaiting_scores: [],
    triggers: [],
    sprints: [],
    verdicts: [],
    ...overrides,
  };
}

export function clickAdd(root: HTMLElement, cardId: number, times = 1): void {
  const row = root.querySelector(`.card-row[data-card-id="${cardId}"]`)!;
  const btn = row.querySelector('.token-add') as HTMLButtonElement;
  for (let i = 0; i < times; i++) btn.click();
}

export function clickRemove(root: HTMLElement, cardId: number, times = 1): void {
  const row = root.querySelector(`.card-row[data-card-id="${cardId}"]`)!;
  const btn = row.querySelector('.token-remove') as HTMLButtonElement;
  for (let i = 0; i < times; i++) btn.click();
}

export function submitButton(root: HTMLElement): HTMLButtonElement {
  return root.querySelector('.submit-allocation') as HTMLButtonElement;
}
