export type Status = "confirmed" | "not_checked" | "rejected";

// Review-status colors; the server sends the same mapping with cluster
// responses, and the two must agree exactly.
export const STATUS_COLORS: Record<Status, string> = {
  confirmed: "red",
  not_checked: "orange",
  rejected: "green",
};

export type Factor = "cs" | "sn" | "se" | "total";

export const FACTORS: Factor[] = ["cs", "sn", "se", "total"];

export function statusColor(status: string): string {
  return STATUS_COLORS[status as Status] ?? "gray";
}
