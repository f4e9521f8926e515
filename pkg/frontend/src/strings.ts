// Single source for every question wording shown to evaluators.

export const QUESTIONS = {
  semanticConsistency:
    "Whether the generated description of the performance is consistent with the content of the child's narrative?",
  abilityRelevance:
    "Whether the generated description of the performance matches with the identified ability?",
  identificationOmission:
    "Whether the child's narrative reflects an ability, but AI failed to identify it?",
  advantages: "What do you think about the advantages of this technology?",
  drawbacks: "What do you think about the drawbacks of this technology?",
} as const;

export const UI_TEXT = {
  loginTitle: "Evaluator sign-in",
  loginHint: "Enter your evaluator id (for example e1) to load your assignment.",
  identifiedTag: "identified",
  unidentifiedTag: "not identified",
  submit: "Submit ratings",
  submitDisabledHint: "Answer every question on this page to enable submit.",
  commentsTitle: "Two final open-ended questions",
  doneTitle: "All done - thank you!",
  retry: "Retry",
  networkError: "Network problem - your answers are kept. Retry when ready.",
  conflictError: "The server rejected part of this page; it was reloaded.",
  shortcuts:
    "Keyboard: ↑/↓ move between questions, y = yes, n = no, Enter = submit.",
} as const;
