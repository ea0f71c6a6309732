"""Run the service: ``python -m scorer_service --host 0.0.0.0 --port 8400``."""

import argparse

import uvicorn

from .app import create_app
from .config import ServiceConfig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="scorer-service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8400)
    args = parser.parse_args(argv)
    uvicorn.run(create_app(ServiceConfig.from_env()), host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
