// Screen flow: login -> rate bundles until the queue is empty -> open-ended
// comments -> done. The server is the source of truth; only in-flight answers
// live here.

import { ApiClient, ApiError, Bundle } from "./api.js";
import { BundleForm, QuestionKey } from "./state.js";
import { QUESTIONS, UI_TEXT } from "./strings.js";

const QUESTION_TEXT: Record<QuestionKey, string> = {
  semantic_consistency: QUESTIONS.semanticConsistency,
  ability_relevance: QUESTIONS.abilityRelevance,
  omission: QUESTIONS.identificationOmission,
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  private evaluatorId = "";
  private form: BundleForm | null = null;
  private focusIndex = 0;
  private banner: { text: string; retry: boolean } | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient = new ApiClient(),
  ) {}

  start(): void {
    document.addEventListener("keydown", (event) => this.onKey(event));
    this.renderLogin();
  }

  // ---- login ---------------------------------------------------------------

  private renderLogin(errorText?: string): void {
    this.root.replaceChildren();
    const box = el("div", "panel");
    box.append(el("h1", undefined, UI_TEXT.loginTitle));
    box.append(el("p", "hint", UI_TEXT.loginHint));
    const input = el("input");
    input.placeholder = "evaluator id";
    input.id = "evaluator-input";
    const button = el("button", "primary", "Start");
    const error = el("p", "error", errorText ?? "");
    button.addEventListener("click", () => this.login(input.value.trim()));
    input.addEventListener("keydown", (event) => {
      if (event.key === "Enter") this.login(input.value.trim());
    });
    box.append(input, button, error);
    this.root.append(box);
    input.focus();
  }

  private async login(evaluatorId: string): Promise<void> {
    if (!evaluatorId) return;
    try {
      await this.api.createSession(evaluatorId);
      this.evaluatorId = evaluatorId;
      await this.loadNext();
    } catch (error) {
      this.renderLogin(
        error instanceof ApiError && error.status === 404
          ? `No assignment found for "${evaluatorId}".`
          : `Sign-in failed: ${String(error)}`,
      );
    }
  }

  // ---- rating loop -----------------------------------------------------------

  private async loadNext(): Promise<void> {
    try {
      const bundle = await this.api.nextBundle();
      if (bundle === null) {
        this.renderComments();
        return;
      }
      this.form = new BundleForm(bundle);
      this.focusIndex = 0;
      this.renderBundle(bundle);
    } catch (error) {
      this.showFatal(`Could not load the next page: ${String(error)}`);
    }
  }

  private renderBundle(bundle: Bundle): void {
    const form = this.form!;
    this.root.replaceChildren();
    const panel = el("div", "panel");
    panel.append(el("h1", undefined, `Narrative ${bundle.activity_id}`));
    if (this.banner) {
      const bar = el("div", "banner", this.banner.text);
      if (this.banner.retry) {
        const retry = el("button", undefined, UI_TEXT.retry);
        retry.addEventListener("click", () => void this.submit());
        bar.append(" ", retry);
      }
      panel.append(bar);
    }
    const narrative = el("blockquote", "narrative", bundle.narrative);
    panel.append(narrative);
    panel.append(el("p", "hint", UI_TEXT.shortcuts));

    const questions = form.allQuestions();
    let flatIndex = 0;
    for (const card of form.cards) {
      const cardBox = el("div", "card");
      const head = el("div", "card-head");
      head.append(el("span", "ability", card.item.ability_display));
      head.append(
        el(
          "span",
          card.item.kind === "identified" ? "tag identified" : "tag unidentified",
          card.item.kind === "identified"
            ? UI_TEXT.identifiedTag
            : UI_TEXT.unidentifiedTag,
        ),
      );
      cardBox.append(head);
      if (card.item.behavior) {
        cardBox.append(el("p", "behavior", card.item.behavior));
      }
      for (const question of card.questions) {
        const index = flatIndex++;
        const row = el("div", "question");
        row.dataset.index = String(index);
        if (index === this.focusIndex) row.classList.add("focused");
        row.append(el("span", "question-text", QUESTION_TEXT[question.key]));
        const toggles = el("span", "toggles");
        for (const value of [true, false]) {
          const button = el(
            "button",
            question.answer === value ? "toggle selected" : "toggle",
            value ? "yes" : "no",
          );
          button.addEventListener("click", () => {
            form.setAnswer(card.item.item_id, question.key, value);
            this.focusIndex = Math.min(index + 1, questions.length - 1);
            this.renderBundle(bundle);
          });
          toggles.append(button);
        }
        row.append(toggles);
        cardBox.append(row);
      }
      panel.append(cardBox);
    }

    const submit = el("button", "primary", UI_TEXT.submit);
    submit.disabled = !form.isComplete();
    submit.addEventListener("click", () => void this.submit());
    panel.append(submit);
    if (!form.isComplete()) {
      panel.append(
        el(
          "p",
          "hint",
          `${UI_TEXT.submitDisabledHint} (${form.unansweredCount()} left)`,
        ),
      );
    }
    this.root.append(panel);
  }

  private async submit(): Promise<void> {
    const form = this.form;
    if (!form || !form.isComplete()) return;
    this.banner = null;
    try {
      for (const payload of form.payloads()) {
        const item = form.bundle.items.find((i) => i.item_id === payload.item_id);
        if (item?.rated) continue; // already stored on a previous attempt
        try {
          await this.api.submitRating(payload);
          if (item) item.rated = true;
        } catch (error) {
          if (error instanceof ApiError && error.status === 409) {
            if (item) item.rated = true; // duplicate: stored previously
            continue;
          }
          throw error;
        }
      }
      await this.loadNext();
    } catch (error) {
      if (error instanceof ApiError && (error.status === 422 || error.status === 404)) {
        this.banner = { text: UI_TEXT.conflictError, retry: false };
        await this.loadNext();
      } else {
        // network trouble: keep the answers, offer retry
        this.banner = { text: UI_TEXT.networkError, retry: true };
        this.renderBundle(form.bundle);
      }
    }
  }

  // ---- comments and done ------------------------------------------------------

  private renderComments(): void {
    this.root.replaceChildren();
    const panel = el("div", "panel");
    panel.append(el("h1", undefined, UI_TEXT.commentsTitle));
    const advantagesLabel = el("label", undefined, QUESTIONS.advantages);
    const advantages = el("textarea");
    const drawbacksLabel = el("label", undefined, QUESTIONS.drawbacks);
    const drawbacks = el("textarea");
    const button = el("button", "primary", "Send and finish");
    const error = el("p", "error");
    button.addEventListener("click", async () => {
      try {
        if (advantages.value.trim()) {
          await this.api.submitComment("advantages", advantages.value.trim());
        }
        if (drawbacks.value.trim()) {
          await this.api.submitComment("drawbacks", drawbacks.value.trim());
        }
        await this.renderDone();
      } catch (sendError) {
        error.textContent = `Could not send comments: ${String(sendError)}`;
      }
    });
    panel.append(advantagesLabel, advantages, drawbacksLabel, drawbacks, button, error);
    this.root.append(panel);
  }

  private async renderDone(): Promise<void> {
    let statsLine = "";
    try {
      const progress = await this.api.progress();
      const mine = progress.evaluators.find(
        (p) => p.evaluator_id === this.evaluatorId,
      );
      if (mine) statsLine = `You rated ${mine.rated} of ${mine.assigned} items.`;
    } catch {
      statsLine = "";
    }
    this.root.replaceChildren();
    const panel = el("div", "panel");
    panel.append(el("h1", undefined, UI_TEXT.doneTitle));
    if (statsLine) panel.append(el("p", undefined, statsLine));
    this.root.append(panel);
  }

  // ---- keyboard -----------------------------------------------------------------

  private onKey(event: KeyboardEvent): void {
    const form = this.form;
    if (!form) return;
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "TEXTAREA")) {
      return;
    }
    const questions = form.allQuestions();
    if (!questions.length) return;
    if (event.key === "ArrowDown" || event.key === "ArrowRight") {
      this.focusIndex = Math.min(this.focusIndex + 1, questions.length - 1);
    } else if (event.key === "ArrowUp" || event.key === "ArrowLeft") {
      this.focusIndex = Math.max(this.focusIndex - 1, 0);
    } else if (event.key === "y" || event.key === "n") {
      const question = questions[this.focusIndex];
      const card = form.cards[question.itemIndex];
      form.setAnswer(card.item.item_id, question.key, event.key === "y");
      this.focusIndex = Math.min(this.focusIndex + 1, questions.length - 1);
    } else if (event.key === "Enter") {
      void this.submit();
      return;
    } else {
      return;
    }
    event.preventDefault();
    this.renderBundle(form.bundle);
  }

  private showFatal(text: string): void {
    this.root.replaceChildren();
    const panel = el("div", "panel");
    panel.append(el("h1", undefined, "Something went wrong"));
    panel.append(el("p", "error", text));
    this.root.append(panel);
  }
}
