// Token allocation board: tap to add or remove tokens on a card, grouped
// by theme, with a live remaining-budget counter. Submission is enabled
// only at exactly zero remaining, so no interaction sequence can send a
// sum that misses the budget.

import type { ApiClient } from './api';
import type { SessionView } from './types';
import { THEME_ORDER } from './types';

export interface BoardOptions {
  onSubmitted?: (awaiting: string[]) => void;
  onError?: (message: string) => void;
}

export class AllocationBoard {
  readonly root: HTMLElement;
  private tokens = new Map<number, number>();
  private remainingEl!: HTMLElement;
  private submitBtn!: HTMLButtonElement;
  private statusEl!: HTMLElement;
  private counts = new Map<number, HTMLElement>();

  constructor(
    private client: ApiClient,
    private view: SessionView,
    private stakeholderId: string,
    private options: BoardOptions = {},
  ) {
    this.root = document.createElement('section');
    this.root.className = 'allocation-board';
    for (const card of view.deck.cards) this.tokens.set(card.card_id, 0);
    this.render();
  }

  get remaining(): number {
    let used = 0;
    for (const v of this.tokens.values()) used += v;
    return this.view.token_budget - used;
  }

  allocation(): Record<number, number> {
    return Object.fromEntries(this.tokens);
  }

  private render() {
    const header = document.createElement('header');
    const title = document.createElement('h2');
    title.textContent = `Round ${this.view.open_round ?? '?'}: distribute your tokens`;
    this.remainingEl = document.createElement('p');
    this.remainingEl.className = 'remaining';
    header.append(title, this.remainingEl);
    this.root.append(header);

    const themes = new Map<string, HTMLElement>();
    for (const theme of THEME_ORDER) {
      const group = document.createElement('fieldset');
      group.className = 'theme-group';
      const legend = document.createElement('legend');
      legend.textContent = theme.replace(/_/g, ' & ');
      group.append(legend);
      themes.set(theme, group);
    }

    for (const card of this.view.deck.cards) {
      const row = document.createElement('div');
      row.className = 'card-row';
      row.dataset.cardId = String(card.card_id);

      const label = document.createElement('span');
      label.className = 'card-label';
      label.textContent = `#${card.card_id} ${card.name}`;

      const minus = document.createElement('button');
      minus.type = 'button';
      minus.className = 'token-remove';
      minus.textContent = '−';
      minus.addEventListener('click', () => this.adjust(card.card_id, -1));

      const count = document.createElement('span');
      count.className = 'token-count';
      count.textContent = '0';
      this.counts.set(card.card_id, count);

      const plus = document.createElement('button');
      plus.type = 'button';
      plus.className = 'token-add';
      plus.textContent = '+';
      plus.addEventListener('click', () => this.adjust(card.card_id, +1));

      row.append(label, minus, count, plus);
      (themes.get(card.theme) ?? themes.get(THEME_ORDER[0])!).append(row);
    }
    for (const group of themes.values()) {
      if (group.childElementCount > 1) this.root.append(group);
    }

    this.submitBtn = document.createElement('button');
    this.submitBtn.type = 'button';
    this.submitBtn.className = 'submit-allocation';
    this.submitBtn.textContent = 'Submit allocation';
    this.submitBtn.addEventListener('click', () => void this.submit());

    this.statusEl = document.createElement('p');
    this.statusEl.className = 'board-status';

    this.root.append(this.submitBtn, this.statusEl);
    this.sync();
  }

  private adjust(cardId: number, delta: number) {
    const current = this.tokens.get(cardId) ?? 0;
    // floor at zero per card, ceiling at the budget overall
    if (delta > 0 && this.remaining <= 0) return;
    const next = current + delta;
    if (next < 0) return;
    this.tokens.set(cardId, next);
    this.sync();
  }

  private sync() {
    const remaining = this.remaining;
    this.remainingEl.textContent = `${remaining} of ${this.view.token_budget} tokens remaining`;
    for (const [cardId, el] of this.counts) {
      el.textContent = String(this.tokens.get(cardId) ?? 0);
    }
    this.submitBtn.disabled = remaining !== 0;
  }

  async submit(): Promise<void> {
    if (this.remaining !== 0) {
      // belt and braces: the button is disabled whenever this holds
      this.statusEl.textContent = `cannot submit: ${this.remaining} tokens unplaced`;
      return;
    }
    const round = this.view.open_round;
    if (round === null) {
      this.statusEl.textContent = 'no open round';
      return;
    }
    try {
      const result = await this.client.submitAllocation(
        this.view.session_id,
        round,
        this.stakeholderId,
        this.allocation(),
      );
      const awaiting = result.round.awaiting;
      this.statusEl.textContent =
        awaiting.length === 0
          ? 'submitted; everyone is in'
          : `submitted, awaiting ${awaiting.length} others`;
      this.options.onSubmitted?.(awaiting);
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      this.statusEl.textContent = `submission failed: ${message}`;
      this.options.onError?.(message);
    }
  }
}
