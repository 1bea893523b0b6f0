import type { VictimSnapshot, VictimStatus } from "./types.js";

/** HTTP failure with the status code preserved so callers can branch on
 *  404 (victim gone) vs 409 (someone else got there first). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function errorMessage(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { error?: unknown };
    if (typeof body.error === "string") {
      return body.error;
    }
  } catch {
    // not a JSON error envelope; fall through to the status line
  }
  return `${response.status} ${response.statusText}`;
}

export async function fetchVictims(
  baseUrl: string,
  filter?: { status?: VictimStatus; acuity?: number },
): Promise<VictimSnapshot[]> {
  const params = new URLSearchParams();
  if (filter?.status !== undefined) params.set("status", filter.status);
  if (filter?.acuity !== undefined) params.set("acuity", String(filter.acuity));
  const query = params.size > 0 ? `?${params}` : "";
  const response = await fetch(`${baseUrl}/api/victims${query}`);
  if (!response.ok) {
    throw new ApiError(response.status, await errorMessage(response));
  }
  return (await response.json()) as VictimSnapshot[];
}

export async function postStatus(
  baseUrl: string,
  victimId: string,
  status: VictimStatus,
  responder: string,
): Promise<VictimSnapshot> {
  const response = await fetch(
    `${baseUrl}/api/victims/${encodeURIComponent(victimId)}/status`,
    {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ status, responder }),
    },
  );
  if (!response.ok) {
    throw new ApiError(response.status, await errorMessage(response));
  }
  return (await response.json()) as VictimSnapshot;
}
