// Side-by-side scenario comparison: launch all four optimization jobs, poll
// until each settles, and render one card per scenario with its processing
// time, throughput, and per-block histogram.

import { ApiClient, JobStatus, ScenarioOutcome } from "./api.js";

const SCENARIO_TITLES: Record<number, string> = {
  1: "Random stacking",
  2: "Random + segments",
  3: "Scored stacking + segments",
  4: "Scored + recursive appointments",
};

export interface CompareOptions {
  seed?: number;
  pollMs?: number;
  timeoutMs?: number;
}

export async function runComparison(
  api: ApiClient,
  root: HTMLElement,
  options: CompareOptions = {},
): Promise<JobStatus[]> {
  const pollMs = options.pollMs ?? 1000;
  const timeoutMs = options.timeoutMs ?? 120_000;
  root.textContent = "";
  const cards = new Map<number, HTMLElement>();
  const jobs: { scenario: number; jobId: string }[] = [];
  for (const scenario of [1, 2, 3, 4]) {
    const card = document.createElement("div");
    card.className = "scenario-card running";
    card.dataset.scenario = String(scenario);
    card.textContent = `${SCENARIO_TITLES[scenario]} — running…`;
    root.appendChild(card);
    cards.set(scenario, card);
    jobs.push({ scenario, jobId: await api.startOptimize(scenario, options.seed) });
  }

  const settled: JobStatus[] = [];
  const deadline = Date.now() + timeoutMs;
  const pending = new Map(jobs.map((j) => [j.jobId, j.scenario]));
  while (pending.size > 0) {
    if (Date.now() > deadline) {
      throw new Error(`comparison timed out with ${pending.size} jobs running`);
    }
    await sleep(pollMs);
    for (const [jobId, scenario] of [...pending.entries()]) {
      const status = await api.jobStatus(jobId);
      if (status.status === "running") {
        continue;
      }
      pending.delete(jobId);
      settled.push(status);
      const card = cards.get(scenario)!;
      if (status.status === "done" && status.result) {
        renderCard(card, status.result);
      } else {
        card.className = "scenario-card failed";
        card.textContent = `${SCENARIO_TITLES[scenario]} — failed: ${status.error ?? "unknown"}`;
      }
    }
  }
  settled.sort((a, b) => a.scenario - b.scenario);
  return settled;
}

function renderCard(card: HTMLElement, outcome: ScenarioOutcome): void {
  card.className = "scenario-card done";
  card.textContent = "";
  const title = document.createElement("h3");
  title.textContent = SCENARIO_TITLES[outcome.scenario] ?? `Scenario ${outcome.scenario}`;
  const pt = document.createElement("div");
  pt.className = "stat pt";
  pt.dataset.value = outcome.pt === null ? "" : outcome.pt.toFixed(4);
  pt.textContent = outcome.pt === null ? "PT: undefined" : `PT: ${outcome.pt.toFixed(1)} min`;
  const m = document.createElement("div");
  m.className = "stat m";
  m.dataset.value = String(outcome.m);
  m.textContent = `M: ${outcome.m} trucks`;
  card.append(title, pt, m);
  const strip = document.createElement("div");
  strip.className = "mini-bars";
  for (const row of outcome.histogram) {
    const bar = document.createElement("span");
    bar.className = "mini-bar" + (row.demand > row.capacity ? " over" : "");
    bar.dataset.value = String(row.serviced);
    bar.style.height = `${Math.min(row.serviced, 40) * 2}px`;
    strip.appendChild(bar);
  }
  card.appendChild(strip);
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
