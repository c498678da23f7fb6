"""HTTP delivery service for packed image collections.

Endpoints:
    GET /image?title=<t>&page=<p>  -> image bytes, 404 unknown, 400 malformed
    GET /health                    -> 200

Every image response carries ``X-RacLib-Source: cache|library`` and
``X-RacLib-Millis`` so cache behaviour is observable from the outside.
"""

from __future__ import annotations

import logging
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from .cache import BucketCache, DeliveryRequest, ImageResolver
from .config import Config
from .errors import NotFoundError
from .pack import CollectionSet

logger = logging.getLogger(__name__)

_MAGIC_TYPES = [
    (b"\xff\xd8\xff", "image/jpeg"),
    (b"\x89PNG\r\n\x1a\n", "image/png"),
    (b"GIF87a", "image/gif"),
    (b"GIF89a", "image/gif"),
]


def sniff_content_type(payload: bytes) -> str:
    for magic, content_type in _MAGIC_TYPES:
        if payload.startswith(magic):
            return content_type
    return "image/jpeg"


class DeliveryHandler(BaseHTTPRequestHandler):
    server: "DeliveryServer"

    def do_GET(self):
        parts = urlsplit(self.path)
        if parts.path == "/health":
            self._send(200, b"ok\n", "text/plain")
        elif parts.path == "/image":
            self._serve_image(parse_qs(parts.query))
        else:
            self._send(404, b"not found\n", "text/plain")

    def _serve_image(self, params):
        try:
            request = DeliveryRequest(
                title=params.get("title", [""])[0],
                page=params.get("page", [""])[0],
            )
        except ValueError as exc:
            self._send(400, f"bad request: {exc}\n".encode(), "text/plain")
            return
        try:
            result = self.server.resolver.resolve(request)
        except NotFoundError:
            self._send(404, b"unknown title/page\n", "text/plain")
            return
        except OSError:
            logger.exception("delivery failed for %s", self.path)
            self._send(500, b"internal error\n", "text/plain")
            return
        self._send(
            200,
            result.payload,
            sniff_content_type(result.payload),
            extra={
                "X-RacLib-Source": result.source,
                "X-RacLib-Millis": f"{result.fetch_millis:.1f}",
            },
        )

    def _send(self, status: int, body: bytes, content_type: str, extra: dict | None = None):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for name, value in (extra or {}).items():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, format, *args):
        logger.debug("%s - %s", self.address_string(), format % args)


class DeliveryServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], resolver: ImageResolver):
        super().__init__(address, DeliveryHandler)
        self.resolver = resolver


def build_resolver(config: Config) -> ImageResolver:
    """Wire the collections under library_dir to a rotating cache."""
    collections = CollectionSet.load_dir(config.library_dir)
    cache = BucketCache(
        config.cache_root,
        bucket_width=config.bucket_width_seconds,
        bucket_ttl=config.bucket_ttl_seconds,
    )
    return ImageResolver(collections.fetch, cache)


def serve(config: Config) -> None:
    """Run the delivery service until interrupted."""
    server = DeliveryServer(("", config.port), build_resolver(config))
    logger.info("serving %s on port %d", config.library_dir, config.port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
