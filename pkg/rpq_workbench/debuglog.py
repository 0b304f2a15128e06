import sys
import time


class DebugLog:
    """Area-prefixed diagnostics on stderr, silent unless enabled."""

    def __init__(self, enabled: bool, timestamps: bool = False):
        self.enabled = enabled
        self.timestamps = timestamps

    def emit(self, message: str) -> None:
        if not self.enabled:
            return
        if self.timestamps:
            message = f"{time.strftime('%H:%M:%S')} {message}"
        print(message, file=sys.stderr)


NULL_LOG = DebugLog(enabled=False)
