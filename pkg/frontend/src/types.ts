/** Wire types mirrored from the session service. */

export type Phase =
  | 'open'
  | 'retraction-vote'
  | 'attack-defense'
  | 'failed'
  | 'closed';

export type MoveKind =
  | 'AssertFact'
  | 'AssertClassicalRule'
  | 'AssertDefault'
  | 'Attack'
  | 'Defend'
  | 'Elaborate'
  | 'Confirm'
  | 'Agree'
  | 'ExpertOpinion'
  | 'RetractProposal'
  | 'RetractVote'
  | 'ArbiterQuestion'
  | 'ArbiterTargetChoice';

export interface MoveView {
  id: string;
  author: string;
  kind: MoveKind;
  payload: Record<string, unknown>;
  based_on: string[];
  retracted: boolean;
  hanging: boolean;
  contested: boolean;
  defended: boolean;
  attackable_components: string[];
}

export interface ParticipantView {
  id: string;
  name: string;
  role: 'participant' | 'arbiter';
}

export interface StateView {
  seq: number;
  phase: Phase;
  participants: ParticipantView[];
  moves: MoveView[];
  mis: string[][];
  frequencies: Record<string, number>;
  open_proposal: {
    proposal: string;
    target: string;
    votes: { voter: string; yes: boolean }[];
  } | null;
  verdict: {
    outcome: string;
    surviving: string[];
    theory: string;
  } | null;
}

export interface CellView {
  code: string;
  expression: string;
  size: number;
  valid: string[];
}

export interface HierarchyView {
  cells: CellView[];
  hasse: [string, string][];
  packets: { cell: string; kind: 'mu' | 'o'; size: number }[];
  packet_pairs: [string, string][];
}

export interface MoveResponse {
  ok: boolean;
  events: Record<string, unknown>[];
  state: StateView;
}

export interface SessionCreated {
  session_id: string;
  events: Record<string, unknown>[];
  state: StateView;
}
