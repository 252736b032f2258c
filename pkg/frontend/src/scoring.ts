// Likert scoring form: one 1..5 control per card with the exact scale
// wording. Submission stays disabled until every card has a score; the
// missing ones are highlighted.

import type { ApiClient } from './api';
import type { SessionView } from './types';
import { LIKERT_LABELS } from './types';

export interface ScoringOptions {
  onSubmitted?: (complete: boolean) => void;
  onError?: (message: string) => void;
}

export class ScoringForm {
  readonly root: HTMLElement;
  private selections = new Map<number, number>();
  private submitBtn!: HTMLButtonElement;
  private statusEl!: HTMLElement;
  private rows = new Map<number, HTMLElement>();

  constructor(
    private client: ApiClient,
    private view: SessionView,
    private stakeholderId: string,
    private options: ScoringOptions = {},
  ) {
    this.root = document.createElement('section');
    this.root.className = 'scoring-form';
    this.render();
  }

  get missingCards(): number[] {
    return this.view.deck.cards
      .map((c) => c.card_id)
      .filter((id) => !this.selections.has(id));
  }

  scores(): Record<number, number> {
    return Object.fromEntries(this.selections);
  }

  private render() {
    const title = document.createElement('h2');
    title.textContent = 'How well was each card covered, given its priority?';
    this.root.append(title);

    for (const card of this.view.deck.cards) {
      const row = document.createElement('div');
      row.className = 'score-row incomplete';
      row.dataset.cardId = String(card.card_id);
      this.rows.set(card.card_id, row);

      const label = document.createElement('span');
      label.className = 'card-label';
      label.textContent = `#${card.card_id} ${card.name}`;
      row.append(label);

      for (let value = 1; value <= 5; value++) {
        const option = document.createElement('label');
        option.className = 'likert-option';
        const input = document.createElement('input');
        input.type = 'radio';
        input.name = `score-${card.card_id}`;
        input.value = String(value);
        input.addEventListener('change', () => this.select(card.card_id, value));
        const text = document.createElement('span');
        text.textContent = `${value}: ${LIKERT_LABELS[value]}`;
        option.append(input, text);
        row.append(option);
      }
      this.root.append(row);
    }

    this.submitBtn = document.createElement('button');
    this.submitBtn.type = 'button';
    this.submitBtn.className = 'submit-scores';
    this.submitBtn.textContent = 'Submit scores';
    this.submitBtn.disabled = true;
    this.submitBtn.addEventListener('click', () => void this.submit());
    this.statusEl = document.createElement('p');
    this.statusEl.className = 'scoring-status';
    this.root.append(this.submitBtn, this.statusEl);
    this.sync();
  }

  private select(cardId: number, value: number) {
    this.selections.set(cardId, value);
    this.sync();
  }

  private sync() {
    for (const [cardId, row] of this.rows) {
      row.classList.toggle('incomplete', !this.selections.has(cardId));
    }
    const missing = this.missingCards;
    this.submitBtn.disabled = missing.length > 0;
    this.statusEl.textContent =
      missing.length > 0 ? `${missing.length} cards still unscored` : 'all cards scored';
  }

  async submit(): Promise<void> {
    if (this.missingCards.length > 0) return;
    try {
      const result = await this.client.submitScores(
        this.view.session_id,
        this.stakeholderId,
        this.scores(),
      );
      this.statusEl.textContent = result.assessment_complete
        ? 'scores in; assessment complete'
        : `scores in; awaiting ${result.awaiting.length} others`;
      this.options.onSubmitted?.(result.assessment_complete);
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      this.statusEl.textContent = `submission failed: ${message}`;
      this.options.onError?.(message);
    }
  }
}
