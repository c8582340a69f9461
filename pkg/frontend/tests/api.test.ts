import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function mockFetch(status: number, body: unknown) {
  return vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    statusText: String(status),
    json: async () => body,
    text: async () => JSON.stringify(body),
  })) as unknown as typeof fetch;
}

describe("api client", () => {
  it("hits the versioned paths with JSON bodies", async () => {
    const fetchImpl = mockFetch(200, { id: "abc" });
    const api = new ApiClient("http://x", fetchImpl);
    await api.createRun({ scenario_id: "s1", p_cases: 10, seed: 3 });
    const call = (fetchImpl as unknown as ReturnType<typeof vi.fn>).mock.calls[0];
    expect(call[0]).toBe("http://x/api/v1/runs");
    expect(call[1].method).toBe("POST");
    expect(JSON.parse(call[1].body)).toEqual({ scenario_id: "s1", p_cases: 10, seed: 3 });
  });

  it("surfaces the server's detail message on errors", async () => {
    const api = new ApiClient("", mockFetch(409, { detail: "scenario has unfinished runs" }));
    await expect(api.patchProfile("s", "r", { cost_per_hour: 1 })).rejects.toThrowError(
      ApiError,
    );
    await expect(api.patchProfile("s", "r", { cost_per_hour: 1 })).rejects.toThrow(
      /unfinished runs/,
    );
  });

  it("encodes the scenario filter for run listings", async () => {
    const fetchImpl = mockFetch(200, []);
    const api = new ApiClient("", fetchImpl);
    await api.listRuns("a b");
    const call = (fetchImpl as unknown as ReturnType<typeof vi.fn>).mock.calls[0];
    expect(call[0]).toBe("/api/v1/runs?scenario_id=a%20b");
  });
});
