// Page bootstrap: wires the yard grid, schedule bars, booking form, and the
// scenario comparison strip to a running service. The service URL defaults to
// the page origin so the console works when mounted at /console.

import { ApiClient, Occupant } from "./api.js";
import { bookAppointmentFlow, describeProposal } from "./bookingFlow.js";
import { runComparison } from "./compareFlow.js";
import { renderHistogram, renderSchedule } from "./scheduleView.js";
import { renderDetail, renderYard } from "./yardView.js";

function byId(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

export async function boot(baseUrl?: string): Promise<void> {
  const api = new ApiClient(baseUrl ?? window.location.origin.replace(/\/$/, ""));
  const yardRoot = byId("yard");
  const detailRoot = byId("detail");
  const scheduleRoot = byId("schedule");
  const histogramRoot = byId("histogram");
  const statusLine = byId("status");

  const refresh = async () => {
    const [yard, schedule, histogram] = await Promise.all([
      api.yard(),
      api.schedule(),
      api.histogram(),
    ]);
    renderYard(yardRoot, yard, {
      onSelect: (occupant: Occupant) => renderDetail(detailRoot, occupant),
    });
    renderSchedule(scheduleRoot, schedule);
    renderHistogram(histogramRoot, histogram);
  };

  byId("refresh").addEventListener("click", () => void refresh());

  byId("rebalance").addEventListener("click", async () => {
    const report = await api.rebalance();
    statusLine.textContent =
      `Rebalanced: ${report.moves.length} moves, ${report.created.length} new appointments, ` +
      `converged=${report.converged}`;
    await refresh();
  });

  const bookingForm = byId("booking-form") as HTMLFormElement;
  bookingForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    const containerId = (byId("booking-container") as HTMLInputElement).value.trim();
    const block = Number((byId("booking-block") as HTMLInputElement).value);
    try {
      const result = await bookAppointmentFlow(api, containerId, block, (proposal) =>
        window.confirm(describeProposal(proposal)),
      );
      if (result.outcome === "committed") {
        statusLine.textContent = `Booked ${containerId} into block ${result.committed!.proposed_block}.`;
      } else if (result.outcome === "conflict") {
        statusLine.textContent =
          "The yard changed while you were deciding; review the refreshed proposal and retry.";
      } else {
        statusLine.textContent = "Booking abandoned.";
      }
    } catch (error) {
      statusLine.textContent = `Booking failed: ${(error as Error).message}`;
    }
    await refresh();
  });

  byId("compare").addEventListener("click", async () => {
    statusLine.textContent = "Running the four scenarios…";
    try {
      await runComparison(api, byId("compare-cards"));
      statusLine.textContent = "Comparison finished.";
    } catch (error) {
      statusLine.textContent = `Comparison failed: ${(error as Error).message}`;
    }
  });

  await refresh();
}

declare global {
  interface Window {
    yardflowBoot: typeof boot;
  }
}

if (typeof window !== "undefined") {
  window.yardflowBoot = boot;
  if (document.readyState !== "loading") {
    void boot();
  } else {
    document.addEventListener("DOMContentLoaded", () => void boot());
  }
}
