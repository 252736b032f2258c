// End-to-end acceptance against the real backend: spawn the Python API,
// drive the allocation board through clicks, and confirm the submission
// lands in the server's audit journal while short submissions never
// leave the browser.

import { type ChildProcess, spawn } from 'node:child_process';
import { mkdtempSync, rmSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api';
import { AllocationBoard } from '../src/board';
import { clickAdd, submitButton } from './helpers';
import type { SessionView } from '../src/types';

const REPO_ROOT = join(dirname(fileURLToPath(import.meta.url)), '..', '..');
const PORT = 18000 + Math.floor(Math.random() * 10000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let storageDir: string;

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const resp = await fetch(`${BASE}/sessions/probe`);
      if (resp.status === 404) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error('backend did not come up');
}

beforeAll(async () => {
  storageDir = mkdtempSync(join(tmpdir(), 'ethosboard-ui-'));
  server = spawn(
    'python3',
    ['-m', 'ethosboard.cli', 'serve', '--port', String(PORT), '--storage-dir', storageDir],
    { cwd: REPO_ROOT, stdio: 'ignore' },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill();
  rmSync(storageDir, { recursive: true, force: true });
});

describe('allocation board against the live backend', () => {
  it('a clicked-out allocation reaches the audit journal; a short one cannot', async () => {
    const bootstrap = new ApiClient(BASE);
    const created = await bootstrap.createSession({
      stakeholders: [
        {
          stakeholder_id: 'fac',
          display_name: 'Facilitator',
          role_label: 'facilitation',
          required: false,
          facilitator: true,
        },
        { stakeholder_id: 's1', display_name: 'Voter One', role_label: 'product' },
        { stakeholder_id: 's2', display_name: 'Voter Two', role_label: 'compliance' },
      ],
    });
    const session = created.session_id;

    const facilitator = new ApiClient(BASE, created.tokens['fac']);
    await facilitator.openRound(session);

    const me = new ApiClient(BASE, created.tokens['s1']);
    const view = (await me.getSession(session)) as SessionView;
    expect(view.token_budget).toBe(21);

    const board = new AllocationBoard(me, view, 's1');

    // place all but one token: the UI must refuse to submit
    clickAdd(board.root, 8, 10);
    clickAdd(board.root, 7, 10);
    expect(board.remaining).toBe(1);
    expect(submitButton(board.root).disabled).toBe(true);
    await board.submit(); // directly invoked, still gated client-side
    let audit = await facilitator.getAudit(session);
    expect(
      audit.events.filter((e) => e.kind === 'allocation_submitted'),
    ).toHaveLength(0);

    // place the last token: submit goes live and the journal records it
    clickAdd(board.root, 1, 1);
    expect(board.remaining).toBe(0);
    expect(submitButton(board.root).disabled).toBe(false);
    await board.submit();
    expect(board.root.querySelector('.board-status')!.textContent).toContain(
      'submitted, awaiting 1 others',
    );

    audit = await facilitator.getAudit(session);
    const submissions = audit.events.filter((e) => e.kind === 'allocation_submitted');
    expect(submissions).toHaveLength(1);
    const payload = submissions[0].payload as {
      allocation: { stakeholder_id: string; tokens: Record<string, number> };
    };
    expect(payload.allocation.stakeholder_id).toBe('s1');
    expect(payload.allocation.tokens['8']).toBe(10);
    const total = Object.values(payload.allocation.tokens).reduce((a, b) => a + b, 0);
    expect(total).toBe(21);

    // journal stays gapless end to end
    const sequences = audit.events.map((e) => e.sequence);
    expect(sequences).toEqual(Array.from({ length: sequences.length }, (_, i) => i + 1));
  });

  it('server rejects a tampered submission that bypasses the UI gate', async () => {
    const bootstrap = new ApiClient(BASE);
    const created = await bootstrap.createSession({
      stakeholders: [
        {
          stakeholder_id: 'fac',
          display_name: 'Facilitator',
          role_label: 'facilitation',
          required: false,
          facilitator: true,
        },
        { stakeholder_id: 's1', display_name: 'Voter', role_label: 'dev' },
      ],
    });
    const facilitator = new ApiClient(BASE, created.tokens['fac']);
    await facilitator.openRound(created.session_id);
    const me = new ApiClient(BASE, created.tokens['s1']);
    await expect(
      me.submitAllocation(created.session_id, 0, 's1', { 8: 20 }),
    ).rejects.toMatchObject({ machineCode: 'BudgetMismatch', status: 400 });
  });
});
