// Pure answer-state machine for one bundle; the DOM layer renders from this
// and never builds payloads itself, so payload shape always follows the
// item's kind.

import type { Bundle, RatingPayload, SubItem } from "./api.js";

export type YesNo = boolean | null;

export type QuestionKey =
  | "semantic_consistency"
  | "ability_relevance"
  | "omission";

export interface QuestionState {
  itemIndex: number;
  key: QuestionKey;
  answer: YesNo;
}

export interface CardState {
  item: SubItem;
  questions: QuestionState[];
}

function questionsFor(item: SubItem, index: number): QuestionState[] {
  if (item.kind === "identified") {
    return [
      { itemIndex: index, key: "semantic_consistency", answer: null },
      { itemIndex: index, key: "ability_relevance", answer: null },
    ];
  }
  return [{ itemIndex: index, key: "omission", answer: null }];
}

export class BundleForm {
  readonly cards: CardState[];

  constructor(readonly bundle: Bundle) {
    this.cards = bundle.items.map((item, index) => ({
      item,
      questions: questionsFor(item, index),
    }));
  }

  /** Flat list of questions in display order (for focus traversal). */
  allQuestions(): QuestionState[] {
    return this.cards.flatMap((card) => card.questions);
  }

  setAnswer(itemId: string, key: QuestionKey, value: boolean): void {
    const card = this.cards.find((c) => c.item.item_id === itemId);
    if (!card) throw new Error(`unknown item ${itemId}`);
    const question = card.questions.find((q) => q.key === key);
    if (!question) {
      throw new Error(
        `question ${key} does not apply to ${card.item.kind} item ${itemId}`,
      );
    }
    question.answer = value;
  }

  /** Submit gating: every question on the bundle answered. */
  isComplete(): boolean {
    return this.allQuestions().every((q) => q.answer !== null);
  }

  unansweredCount(): number {
    return this.allQuestions().filter((q) => q.answer === null).length;
  }

  /** Kind-correct rating payloads, one per sub-item. */
  payloads(): RatingPayload[] {
    if (!this.isComplete()) {
      throw new Error("bundle is not fully answered");
    }
    return this.cards.map((card) => {
      const payload: RatingPayload = { item_id: card.item.item_id };
      for (const question of card.questions) {
        payload[question.key] = question.answer as boolean;
      }
      return payload;
    });
  }

  /** Clear all answers (used when the server rejects the page). */
  reset(): void {
    for (const question of this.allQuestions()) question.answer = null;
  }
}
