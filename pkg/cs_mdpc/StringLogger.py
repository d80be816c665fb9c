"""Minimal in-memory logger used for tracing keygen, decoder and decryption decisions."""

from collections.abc import Callable
from dataclasses import dataclass, field
from typing import TextIO


@dataclass(slots=True)
class StringLogger:
    """Accumulates log lines in memory until they are drained.

    Args:
        enable: When ``True`` messages are recorded; useful during debugging.
        echo: Optional stream that also receives every recorded line.
        _messages: Backing buffer, normally left at its default.
    """

    enable: bool = False
    echo: TextIO | None = None
    _messages: list[str] = field(default_factory=list)

    def log(self, message: str | Callable[[], str]) -> None:
        """Append *message* when logging is enabled.

        Args:
            message: Text to be recorded verbatim, or a thunk producing it. Thunks are
                only evaluated while the logger is enabled.
        """
        if not self.enable:
            return
        text = message() if callable(message) else message
        self._messages.append(text)
        if self.echo is not None:
            print(text, file=self.echo)

    def pop_all(self) -> list[str]:
        """Return all buffered messages and reset the logger."""
        result = self._messages.copy()
        self._messages.clear()
        return result


default_logger = StringLogger()

__all__ = ["StringLogger", "default_logger"]
