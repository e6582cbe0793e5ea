import { ReviewApi } from "./api.js";
import { ReviewController, statsRows } from "./controller.js";
import { highlightTokens } from "./highlight.js";
import { CRITERIA, type Criterion } from "./types.js";

const api = new ReviewApi("");
const controller = new ReviewController(api);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const LABELS: Record<Criterion, string> = {
  inflection: "Inflection",
  word_order: "Word order",
  lexical_choice: "Lexical choice",
  semantic_coherence: "Semantic coherence",
};

function renderScoreInputs(): void {
  const host = el<HTMLDivElement>("scores");
  host.innerHTML = "";
  for (const criterion of CRITERIA) {
    const row = document.createElement("label");
    row.className = "score-row";
    row.textContent = LABELS[criterion];
    const input = document.createElement("input");
    input.type = "number";
    input.min = "0";
    input.max = "10";
    input.step = "0.5";
    input.dataset.criterion = criterion;
    input.addEventListener("input", () => {
      controller.setScore(criterion, input.value);
      renderFormState();
    });
    row.appendChild(input);
    host.appendChild(row);
  }
}

function renderFormState(): void {
  el<HTMLSpanElement>("average").textContent = controller.averagePreview;
  el<HTMLButtonElement>("submit").disabled = !controller.canSubmit;
  const decision = el<HTMLDivElement>("decision");
  const text = controller.decisionText;
  decision.textContent = text ?? "";
  decision.className = text
    ? `decision ${controller.lastDecision?.decision ?? ""}`
    : "decision";
  el<HTMLDivElement>("error").textContent = controller.error ?? "";
}

function renderCandidate(): void {
  const candidate = controller.current;
  const card = el<HTMLDivElement>("candidate");
  if (!candidate) {
    card.innerHTML = "<p>No unreviewed candidates.</p>";
    el<HTMLButtonElement>("submit").disabled = true;
    return;
  }
  const evidence = candidate.flags.flatMap((f) => f.split(" "));
  card.innerHTML = `
    <div class="meta">${candidate.record_id} · ${candidate.provenance}
      ${candidate.flags.map((f) => `<span class="flag">${f}</span>`).join(" ")}
    </div>
    <p class="en">${highlightTokens(candidate.en_text, [])}</p>
    <p class="ang">${highlightTokens(candidate.ang_text, evidence)}</p>
  `;
  el<HTMLSpanElement>("queue-count").textContent = String(controller.total);
  renderFormState();
}

async function renderStats(): Promise<void> {
  const host = el<HTMLTableSectionElement>("stats-body");
  try {
    const stats = await api.stats();
    host.innerHTML = statsRows(stats)
      .map((row) => `<tr><td>${row.label}</td><td>${row.value}</td></tr>`)
      .join("");
  } catch {
    host.innerHTML = "<tr><td colspan=2>No reviews yet.</td></tr>";
  }
}

function showView(name: "queue" | "stats"): void {
  el<HTMLDivElement>("view-queue").hidden = name !== "queue";
  el<HTMLDivElement>("view-stats").hidden = name !== "stats";
  if (name === "stats") void renderStats();
}

async function init(): Promise<void> {
  renderScoreInputs();
  el<HTMLInputElement>("reviewer").addEventListener("input", (ev) => {
    controller.reviewer = (ev.target as HTMLInputElement).value;
    renderFormState();
  });
  el<HTMLTextAreaElement>("comment").addEventListener("input", (ev) => {
    controller.comment = (ev.target as HTMLTextAreaElement).value;
  });
  el<HTMLButtonElement>("submit").addEventListener("click", async () => {
    try {
      await controller.submit();
    } catch {
      // controller.error carries the server detail
    }
    renderFormState();
  });
  el<HTMLButtonElement>("next").addEventListener("click", () => {
    controller.advance();
    renderCandidate();
  });
  el<HTMLButtonElement>("nav-queue").addEventListener("click", () => showView("queue"));
  el<HTMLButtonElement>("nav-stats").addEventListener("click", () => showView("stats"));
  await controller.load();
  renderCandidate();
}

document.addEventListener("DOMContentLoaded", () => {
  void init();
});
