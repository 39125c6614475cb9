/** Chat view-model: plain state plus pure transition functions, so every
 * interaction is testable without a DOM. The server owns all dialogue
 * state; this is only what the current view needs. */

import { ConflictError } from "./api.js";
import type {
  EntropyDebug,
  GridPayload,
  ItemDetail,
  MessageResponse,
  QuestionPayload,
  SessionCreated,
} from "./types.js";

export interface ChatMessage {
  role: "user" | "agent";
  text: string;
}

export interface ChatState {
  sessionId: string | null;
  strategy: string;
  maxQuestions: number;
  messages: ChatMessage[];
  pendingQuestion: QuestionPayload | null;
  entropyDebug: EntropyDebug | null;
  grid: GridPayload | null;
  itemsDetail: Record<string, ItemDetail>;
  relaxed: string[];
  busy: boolean; // double-send guard: input disabled while a turn is in flight
  done: boolean;
  notice: string | null;
  error: string | null;
  drawerItemId: string | null;
}

export function initialState(): ChatState {
  return {
    sessionId: null,
    strategy: "es",
    maxQuestions: 2,
    messages: [],
    pendingQuestion: null,
    entropyDebug: null,
    grid: null,
    itemsDetail: {},
    relaxed: [],
    busy: false,
    done: false,
    notice: null,
    error: null,
    drawerItemId: null,
  };
}

export function sessionStarted(state: ChatState, created: SessionCreated): ChatState {
  return {
    ...initialState(),
    sessionId: created.session_id,
    strategy: created.strategy,
    maxQuestions: created.k,
  };
}

/** User pressed send: optimistically append and lock the input. */
export function messageSent(state: ChatState, text: string): ChatState {
  return {
    ...state,
    messages: [...state.messages, { role: "user", text }],
    busy: true,
    notice: null,
    error: null,
  };
}

export function responseReceived(state: ChatState, response: MessageResponse): ChatState {
  const next: ChatState = {
    ...state,
    busy: false,
    relaxed: response.relaxed,
    entropyDebug: response.entropy_debug ?? null,
  };
  if (response.type === "question" && response.question) {
    return {
      ...next,
      pendingQuestion: response.question,
      messages: [...state.messages, { role: "agent", text: response.question.question_text }],
    };
  }
  return {
    ...next,
    pendingQuestion: null,
    grid: response.grid ?? null,
    itemsDetail: response.items_detail ?? {},
    done: true,
    messages: [
      ...state.messages,
      { role: "agent", text: "Here is what I found, grouped to show your options." },
    ],
  };
}

export function requestFailed(state: ChatState, error: unknown): ChatState {
  if (error instanceof ConflictError) {
    return { ...state, busy: false, notice: "previous message still processing" };
  }
  const detail = error instanceof Error ? error.message : String(error);
  return { ...state, busy: false, error: detail };
}

export function connectionFailed(state: ChatState, detail: string): ChatState {
  return { ...state, busy: false, error: detail };
}

export function drawerOpened(state: ChatState, itemId: string): ChatState {
  return { ...state, drawerItemId: itemId };
}

export function drawerClosed(state: ChatState): ChatState {
  return { ...state, drawerItemId: null };
}

/** Sending is allowed only with a live session, no turn in flight, and
 * the conversation not yet finished. */
export function canSend(state: ChatState): boolean {
  return state.sessionId !== null && !state.busy && !state.done;
}
