// Facilitator steering: open/close rounds, register and fire triggers,
// start the assessment, record the verdict. Rendered only for tokens
// whose stakeholder carries the facilitator flag; the server enforces
// the same rule with 403s regardless.

import type { ApiClient } from './api';
import type { SessionView } from './types';

export class FacilitatorControls {
  readonly root: HTMLElement;

  constructor(
    private client: ApiClient,
    private view: SessionView,
    private onAction: () => void,
  ) {
    this.root = document.createElement('section');
    this.root.className = 'facilitator-controls';
    this.render();
  }

  private button(label: string, cls: string, action: () => Promise<unknown>): HTMLButtonElement {
    const btn = document.createElement('button');
    btn.type = 'button';
    btn.className = cls;
    btn.textContent = label;
    btn.addEventListener('click', () => {
      void action()
        .then(() => this.onAction())
        .catch((err) => {
          const msg = this.root.querySelector('.facilitator-status') as HTMLElement;
          msg.textContent = err instanceof Error ? err.message : String(err);
        });
    });
    return btn;
  }

  private render() {
    const view = this.view;
    const session = view.session_id;
    const title = document.createElement('h3');
    title.textContent = `facilitator controls (phase: ${view.phase})`;
    this.root.append(title);

    if (view.phase === 'setup' || view.phase === 'reprioritization') {
      if (view.open_round === null) {
        this.root.append(
          this.button('open round', 'open-round', () => this.client.openRound(session)),
        );
      } else {
        const idx = view.open_round;
        this.root.append(
          this.button(`close round ${idx}`, 'close-round', () =>
            this.client.closeRound(session, idx),
          ),
        );
      }
    }

    if (view.phase === 'development') {
      const registered = view.triggers.filter((t) => t.status === 'registered');
      for (const trigger of registered) {
        this.root.append(
          this.button(`fire trigger ${trigger.trigger_id}`, 'fire-trigger', () =>
            this.client.fireTrigger(session, trigger.trigger_id),
          ),
        );
      }
      this.root.append(
        this.button('start assessment', 'start-assessment', () =>
          this.client.startAssessment(session),
        ),
      );
    }

    if (view.phase === 'assessment' && view.has_outcome_picture) {
      this.root.append(
        this.button('verdict: sufficiently ethical', 'verdict-sufficient', () =>
          this.client.recordVerdict(session, 'sufficient', 'facilitated session conclusion'),
        ),
        this.button('verdict: return to re-prioritization', 'verdict-return', () =>
          this.client.recordVerdict(
            session,
            'return_to_reprioritization',
            'facilitated session conclusion',
          ),
        ),
      );
    }

    const status = document.createElement('p');
    status.className = 'facilitator-status';
    this.root.append(status);
  }
}
