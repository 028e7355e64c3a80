// Book-with-preview flow: dry-run the booking, show the planner the proposed
// block and placement, then commit against the version the proposal was made
// for. A 409 on commit means someone else changed the state; the flow
// refetches a fresh proposal and hands control back instead of retrying
// blindly.

import { ApiClient, ApiError, BookingResponse } from "./api.js";

export type ConfirmFn = (proposal: BookingResponse) => boolean | Promise<boolean>;

export interface BookingFlowResult {
  outcome: "committed" | "abandoned" | "conflict";
  proposal: BookingResponse;
  committed?: BookingResponse;
}

export async function bookAppointmentFlow(
  api: ApiClient,
  containerId: string,
  block: number,
  confirm: ConfirmFn,
): Promise<BookingFlowResult> {
  const proposal = await api.bookAppointment({
    container_id: containerId,
    block,
    dry_run: true,
  });
  if (!(await confirm(proposal))) {
    return { outcome: "abandoned", proposal };
  }
  try {
    const committed = await api.bookAppointment({
      container_id: containerId,
      block,
      dry_run: false,
      expected_version: proposal.version,
    });
    return { outcome: "committed", proposal, committed };
  } catch (error) {
    if (error instanceof ApiError && error.status === 409) {
      const fresh = await api.bookAppointment({
        container_id: containerId,
        block,
        dry_run: true,
      });
      return { outcome: "conflict", proposal: fresh };
    }
    throw error;
  }
}

export function describeProposal(proposal: BookingResponse): string {
  const placement = proposal.placement;
  const where = `bay ${placement.bay}, row ${placement.row}, tier ${placement.tier}`;
  if (proposal.proposed_block === proposal.requested_block) {
    return `Block ${proposal.proposed_block} is available; container will sit at ${where}.`;
  }
  return (
    `Block ${proposal.requested_block} is full; ` +
    `shifted to block ${proposal.proposed_block}. Container will sit at ${where}.`
  );
}
