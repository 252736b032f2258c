// App shell: polls session status and swaps the active view by phase.
// Configuration arrives via URL parameters: ?session=ID&me=SID&token=T
// against the API origin (same host by default, ?api=URL to override).

import { ApiClient } from './api';
import { AllocationBoard } from './board';
import { renderComparison } from './comparison';
import { FacilitatorControls } from './facilitator';
import { PicturePanel } from './picture';
import { ScoringForm } from './scoring';
import type { SessionView } from './types';

const POLL_MS = Number(new URLSearchParams(location.search).get('poll') ?? '2000');

interface AppConfig {
  apiBase: string;
  sessionId: string;
  stakeholderId: string;
  token: string;
}

function readConfig(): AppConfig | null {
  const params = new URLSearchParams(location.search);
  const sessionId = params.get('session');
  const stakeholderId = params.get('me');
  const token = params.get('token');
  if (!sessionId || !stakeholderId || !token) return null;
  return {
    apiBase: params.get('api') ?? '',
    sessionId,
    stakeholderId,
    token,
  };
}

export class App {
  private client: ApiClient;
  private picturePanel = new PicturePanel();
  private board: AllocationBoard | null = null;
  private scoring: ScoringForm | null = null;
  private lastPhaseKey = '';

  constructor(
    private root: HTMLElement,
    private config: AppConfig,
  ) {
    this.client = new ApiClient(config.apiBase, config.token);
  }

  async refresh(): Promise<void> {
    const view = await this.client.getSession(this.config.sessionId);
    const me = view.stakeholders.find((s) => s.stakeholder_id === this.config.stakeholderId);
    const phaseKey = `${view.phase}:${view.open_round}:${view.has_outcome_picture}`;
    if (phaseKey !== this.lastPhaseKey) {
      this.lastPhaseKey = phaseKey;
      this.rebuild(view, Boolean(me?.facilitator));
    }
    await this.refreshPicture(view);
  }

  private rebuild(view: SessionView, facilitator: boolean) {
    this.root.replaceChildren();

    const heading = document.createElement('h1');
    heading.textContent = `${view.session_id} — ${view.phase}`;
    this.root.append(heading);

    if (facilitator) {
      this.root.append(
        new FacilitatorControls(this.client, view, () => void this.refresh()).root,
      );
    }

    if (view.open_round !== null) {
      this.board = new AllocationBoard(this.client, view, this.config.stakeholderId, {
        onSubmitted: () => void this.refresh(),
      });
      this.root.append(this.board.root);
    }

    if (view.phase === 'assessment' || view.phase === 'development') {
      this.scoring = new ScoringForm(this.client, view, this.config.stakeholderId, {
        onSubmitted: () => void this.refresh(),
      });
      if (view.phase === 'assessment') this.root.append(this.scoring.root);
    }

    this.root.append(this.picturePanel.root);
  }

  private async refreshPicture(view: SessionView) {
    try {
      if (view.has_outcome_picture) {
        // side-by-side target vs outcome with the drift table
        const [target, outcome, delta] = await Promise.all([
          this.client.getPicture(view.session_id, 'target'),
          this.client.getPicture(view.session_id, 'outcome'),
          this.client.getDelta(view.session_id),
        ]);
        const comparison = renderComparison(target, outcome, delta);
        const existing = this.root.querySelector('.picture-comparison');
        if (existing) existing.replaceWith(comparison);
        else this.root.append(comparison);
        this.picturePanel.root.remove();
      } else if (view.baseline_picture_id) {
        this.picturePanel.show(await this.client.getPicture(view.session_id, 'target'));
      } else {
        this.picturePanel.showEmpty('no picture yet: close round 0 to capture the target state');
      }
    } catch {
      this.picturePanel.showEmpty('picture unavailable');
    }
  }

  start(): void {
    void this.refresh();
    setInterval(() => void this.refresh(), POLL_MS);
  }
}

const rootEl = document.getElementById('app');
const config = readConfig();
if (rootEl && config) {
  new App(rootEl, config).start();
} else if (rootEl) {
  rootEl.textContent = 'missing ?session=…&me=…&token=… parameters';
}
