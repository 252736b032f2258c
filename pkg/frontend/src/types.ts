// Wire formats of the workshop API. The UI renders these verbatim and
// never derives its own metrics; every number on screen originates here.

export type Phase = 'setup' | 'development' | 'reprioritization' | 'assessment' | 'concluded';
export type BubbleColor = 'green' | 'yellow' | 'red' | 'gray';
export type BubbleSize = 'small' | 'medium' | 'large';

export interface CardInfo {
  card_id: number;
  name: string;
  theme: string;
}

export interface DeckInfo {
  cards: CardInfo[];
  token_budget: number;
}

export interface StakeholderInfo {
  stakeholder_id: string;
  display_name: string;
  role_label: string;
  required: boolean;
  facilitator: boolean;
}

export interface RoundStatus {
  round_index: number;
  status: 'open' | 'closed';
  trigger_ref: string | null;
  submitted: string[];
  awaiting: string[];
}

export interface TriggerInfo {
  trigger_id: string;
  description: string;
  category: string;
  status: 'registered' | 'fired' | 'resolved';
  fired_at: string | null;
}

export interface SessionView {
  session_id: string;
  phase: Phase;
  token_budget: number;
  deck: DeckInfo;
  stakeholders: StakeholderInfo[];
  rounds: RoundStatus[];
  open_round: number | null;
  baseline_picture_id: string | null;
  has_outcome_picture: boolean;
  pending_scores_from: string[];
  awaiting_scores: string[];
  triggers: TriggerInfo[];
  sprints: unknown[];
  verdicts: unknown[];
}

export interface BubbleStatsModel {
  total_tokens: number;
  median_tokens: string;
  deviation_count: number;
  coverage_avg: string | null;
  baseline_total: number | null;
}

export interface GhostModel {
  x: string;
  y: string;
  x_display: number;
  y_display: number;
}

export interface BubbleModel {
  card_id: number;
  x: string; // exact "p/q"
  y: string;
  x_display: number;
  y_display: number;
  color: BubbleColor;
  size: BubbleSize;
  label: string;
  name: string;
  theme: string;
  stats: BubbleStatsModel;
  ghost: GhostModel | null;
}

export interface AxisAnchorsModel {
  min_value: string;
  mid_anchor_value: string;
  max_value: string;
  degenerate: boolean;
  mid_card_id: number | null;
}

export interface ChartModel {
  schema_version: string;
  picture_id: string;
  kind: 'target_state' | 'outcome';
  round_ref: number;
  assessment_ref: string | null;
  created_at: string;
  axes: { relevance: AxisAnchorsModel; consensus: AxisAnchorsModel };
  bubbles: BubbleModel[];
}

export interface DeltaRowModel {
  card_id: number;
  label: string;
  name: string;
  baseline_total: number;
  current_total: number;
  total_delta: number;
  size_code: BubbleSize;
  dx: string;
  dy: string;
  dx_display: number;
  dy_display: number;
}

export interface DeltaReportModel {
  baseline_round: number;
  current_round: number;
  trigger_ref: string | null;
  trigger_description: string | null;
  rationales: Record<string, string>;
  rows: DeltaRowModel[];
}

export interface ApiErrorBody {
  machine_code: string;
  message: string;
}

// Exact Likert wording shown on the scoring form.
export const LIKERT_LABELS: Record<number, string> = {
  1: 'strongly disagree',
  2: 'disagree',
  3: 'neither agree nor disagree',
  4: 'agree',
  5: 'agree strongly',
};

export const THEME_ORDER = [
  'analyze',
  'data',
  'transparency',
  'agency_and_oversight',
  'safety_and_security',
  'wellbeing',
  'fairness',
  'accountability',
];
