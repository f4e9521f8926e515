import { describe, expect, it } from "vitest";

import type { Bundle } from "../src/api.js";
import { BundleForm } from "../src/state.js";
import { QUESTIONS } from "../src/strings.js";

function bundle(): Bundle {
  return {
    activity_id: "act00",
    narrative: "we counted ten blocks and built a tower together",
    items: [
      {
        item_id: "act00:numeracy_geometry",
        ability: "numeracy_geometry",
        ability_display: "Numeracy and Geometry",
        kind: "identified",
        behavior: "we counted ten blocks",
        rated: false,
      },
      {
        item_id: "act00:empathy",
        ability: "empathy",
        ability_display: "Empathy",
        kind: "unidentified",
        behavior: null,
        rated: false,
      },
    ],
  };
}

describe("BundleForm", () => {
  it("creates two questions for identified and one for unidentified items", () => {
    const form = new BundleForm(bundle());
    expect(form.cards[0].questions.map((q) => q.key)).toEqual([
      "semantic_consistency",
      "ability_relevance",
    ]);
    expect(form.cards[1].questions.map((q) => q.key)).toEqual(["omission"]);
  });

  it("gates completeness on every toggle being answered", () => {
    const form = new BundleForm(bundle());
    expect(form.isComplete()).toBe(false);
    form.setAnswer("act00:numeracy_geometry", "semantic_consistency", true);
    form.setAnswer("act00:numeracy_geometry", "ability_relevance", false);
    expect(form.isComplete()).toBe(false);
    expect(form.unansweredCount()).toBe(1);
    form.setAnswer("act00:empathy", "omission", true);
    expect(form.isComplete()).toBe(true);
  });

  it("builds payloads whose fields follow the item kind", () => {
    const form = new BundleForm(bundle());
    form.setAnswer("act00:numeracy_geometry", "semantic_consistency", true);
    form.setAnswer("act00:numeracy_geometry", "ability_relevance", true);
    form.setAnswer("act00:empathy", "omission", false);
    const payloads = form.payloads();
    expect(payloads).toEqual([
      {
        item_id: "act00:numeracy_geometry",
        semantic_consistency: true,
        ability_relevance: true,
      },
      { item_id: "act00:empathy", omission: false },
    ]);
    // never a mixed payload
    expect(payloads[0]).not.toHaveProperty("omission");
    expect(payloads[1]).not.toHaveProperty("semantic_consistency");
  });

  it("rejects answers that do not apply to the item kind", () => {
    const form = new BundleForm(bundle());
    expect(() =>
      form.setAnswer("act00:empathy", "semantic_consistency", true),
    ).toThrow(/does not apply/);
    expect(() =>
      form.setAnswer("act00:numeracy_geometry", "omission", true),
    ).toThrow(/does not apply/);
  });

  it("refuses to build payloads while incomplete", () => {
    const form = new BundleForm(bundle());
    expect(() => form.payloads()).toThrow(/not fully answered/);
  });

  it("reset clears every answer", () => {
    const form = new BundleForm(bundle());
    form.setAnswer("act00:empathy", "omission", true);
    form.reset();
    expect(form.allQuestions().every((q) => q.answer === null)).toBe(true);
  });
});

describe("question strings", () => {
  it("carries the three questionnaire wordings", () => {
    expect(QUESTIONS.semanticConsistency).toBe(
      "Whether the generated description of the performance is consistent with the content of the child's narrative?",
    );
    expect(QUESTIONS.abilityRelevance).toBe(
      "Whether the generated description of the performance matches with the identified ability?",
    );
    expect(QUESTIONS.identificationOmission).toBe(
      "Whether the child's narrative reflects an ability, but AI failed to identify it?",
    );
  });
});
