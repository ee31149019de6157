"""
Entry point for serving a fitted model.

    MODEL_PATH=model.fwfm python run.py
"""
import os
import uvicorn

from src.config import get_settings

if __name__ == "__main__":
    settings = get_settings()
    # Hosting platforms pass the port through WEBSITES_PORT
    port = int(os.environ.get("WEBSITES_PORT", settings.port))

    uvicorn.run(
        "src.api_server.main:app",
        host=settings.host,
        port=port,
        log_level=settings.log_level.lower()
    )
