"""Thin client for the service, used by the CLI.

Without a base URL the client mounts the FastAPI app in-process (no socket,
no daemon), so CLI runs stay local and deterministic; with ``base_url`` it
talks to a remote instance over HTTP with the same interface.
"""
from __future__ import annotations

import httpx

__all__ = ["ServiceClient", "ServiceError"]


class ServiceError(RuntimeError):
    def __init__(self, status_code: int, detail: str):
        super().__init__(f"service returned {status_code}: {detail}")
        self.status_code = status_code
        self.detail = detail


class ServiceClient:
    def __init__(self, base_url: str | None = None):
        if base_url is None:
            from fastapi.testclient import TestClient

            from .service import create_app

            self._http = TestClient(create_app())
        else:
            self._http = httpx.Client(base_url=base_url, timeout=300.0)

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _post(self, path: str, payload: dict) -> dict:
        resp = self._http.post(path, json=payload)
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise ServiceError(resp.status_code, str(detail))
        return resp.json()

    def health(self) -> dict:
        resp = self._http.get("/healthz")
        if resp.status_code != 200:
            raise ServiceError(resp.status_code, resp.text)
        return resp.json()

    def base_geodesic(self, **payload) -> dict:
        return self._post("/geodesic/base", payload)

    def bundle_geodesic(self, **payload) -> dict:
        return self._post("/geodesic/bundle", payload)

    def lift(self, **payload) -> dict:
        return self._post("/lift", payload)

    def check_distribution(self, **payload) -> dict:
        return self._post("/distributions/check", payload)

    def verify(self, **payload) -> dict:
        return self._post("/verify", payload)
