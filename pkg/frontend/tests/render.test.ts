/** Golden snapshots: the renderers applied to real API payload fixtures
 * captured from the service. If the server shape or the markup changes,
 * these snapshots change with it. */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  renderApp,
  renderDrawer,
  renderGrid,
  renderQuestionPanel,
  renderRelaxedBanner,
} from "../src/render.js";
import {
  initialState,
  messageSent,
  responseReceived,
  sessionStarted,
} from "../src/state.js";
import type { MessageResponse, SessionCreated } from "../src/types.js";

function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(new URL(`./fixtures/${name}.json`, import.meta.url), "utf-8")) as T;
}

const created = fixture<SessionCreated>("session_created");
const question = fixture<MessageResponse>("question_response");
const recommendations = fixture<MessageResponse>("recommendations_response");
const relaxedResponse = fixture<MessageResponse>("relaxed_response");

describe("grid rendering", () => {
  it("matches the recommendations fixture snapshot", () => {
    expect(renderGrid(recommendations.grid!, recommendations.items_detail!)).toMatchSnapshot();
  });

  it("renders rows exactly as served, no reordering", () => {
    const html = renderGrid(recommendations.grid!, recommendations.items_detail!);
    const served = recommendations.grid!.rows.map((r) => r.label);
    const rendered = [...html.matchAll(/<section class="grid-row"><h3>([^<]*)<\/h3>/g)].map(
      (m) => m[1],
    );
    expect(rendered).toEqual(served);
    const servedIds = recommendations.grid!.rows.flatMap((r) => r.items.map((i) => i.id));
    const renderedIds = [...html.matchAll(/data-item-id="([^"]+)"/g)].map((m) => m[1]);
    expect(renderedIds).toEqual(servedIds);
  });

  it("shows pros/cons snippets from the item details", () => {
    const html = renderGrid(recommendations.grid!, recommendations.items_detail!);
    const firstId = recommendations.grid!.rows[0].items[0].id;
    const firstPro = recommendations.items_detail![firstId].pros[0];
    expect(html).toContain(firstPro);
  });
});

describe("question rendering", () => {
  it("matches the question fixture snapshot", () => {
    expect(
      renderQuestionPanel(question.question!, question.entropy_debug ?? null),
    ).toMatchSnapshot();
  });

  it("quotes the distribution context verbatim", () => {
    const html = renderQuestionPanel(question.question!, null);
    expect(html).toContain(question.question!.distribution_context);
  });
});

describe("relaxed-filter banner", () => {
  it("matches the relaxed fixture snapshot", () => {
    expect(renderRelaxedBanner(relaxedResponse.relaxed)).toMatchSnapshot();
  });

  it("lists every relaxed dimension verbatim", () => {
    const html = renderRelaxedBanner(relaxedResponse.relaxed);
    for (const dim of relaxedResponse.relaxed) {
      expect(html).toContain(`<code>${dim}</code>`);
    }
  });

  it("is absent when nothing was relaxed", () => {
    expect(renderRelaxedBanner([])).toBe("");
  });
});

describe("detail drawer", () => {
  it("matches its fixture snapshot", () => {
    const firstId = recommendations.grid!.rows[0].items[0].id;
    expect(renderDrawer(firstId, recommendations.items_detail![firstId])).toMatchSnapshot();
  });

  it("shows matched liked features when present", () => {
    const detail = Object.entries(recommendations.items_detail!).find(
      ([, d]) => d.matched_likes.length > 0,
    );
    expect(detail).toBeDefined();
    const [id, d] = detail!;
    const html = renderDrawer(id, d);
    expect(html).toContain(`<mark>${d.matched_likes[0]}</mark>`);
  });
});

describe("full app rendering", () => {
  it("renders the terminal recommendation view", () => {
    let state = sessionStarted(initialState(), created);
    state = messageSent(state, "Looking for a used SUV under $30k");
    state = responseReceived(state, recommendations);
    const html = renderApp(state);
    expect(html).toContain('class="grid"');
    expect(html).toContain("disabled"); // session finished, composer locked
    expect(html).toMatchSnapshot();
  });

  it("escapes user-controlled text", () => {
    let state = sessionStarted(initialState(), created);
    state = messageSent(state, "<script>alert(1)</script>");
    const html = renderApp(state);
    expect(html).not.toContain("<script>alert(1)</script>");
    expect(html).toContain("&lt;script&gt;");
  });
});
