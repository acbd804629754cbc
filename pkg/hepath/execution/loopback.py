"""
In-process two-party runs.

Bob's side runs on a background thread over one end of a socket pair while the
caller drives Alice's side on the other end.
"""

import logging
import socket
import threading
from typing import Any, Callable, Optional

from .wire import CountedChannel

logger = logging.getLogger(__name__)


class BackgroundParty:
    """
    Context manager running ``target(channel)`` on a daemon thread.

    Exceptions raised on the thread are captured and re-raised from
    ``__exit__`` (or from ``result()``), so a failing responder fails the run.

    Examples:
        >>> alice_ch, bob_ch = CountedChannel.pair()
        >>> with BackgroundParty(lambda ch: serve(ch), bob_ch) as bob:
        ...     drive(alice_ch)
        >>> bob.result()
    """

    def __init__(self, target: Callable[[CountedChannel], Any], channel: CountedChannel, join_timeout: float = 600.0):
        self.target = target
        self.channel = channel
        self.join_timeout = join_timeout
        self.thread: Optional[threading.Thread] = None
        self._result: Any = None
        self._error: Optional[BaseException] = None

    def _run(self) -> None:
        try:
            self._result = self.target(self.channel)
        except BaseException as e:  # re-raised on the caller's thread
            self._error = e
            logger.error(f"{self.channel.name} thread failed: {e}")
            self.channel.close()

    def __enter__(self) -> "BackgroundParty":
        self.thread = threading.Thread(target=self._run, name=f"{self.channel.name}-party", daemon=True)
        self.thread.start()
        return self

    def __exit__(self, exc_type, exc_value, traceback) -> None:
        if exc_type is not None:
            # Unblock the party thread before waiting on it.
            try:
                self.channel.sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
        if self.thread is not None:
            self.thread.join(timeout=self.join_timeout)
            if self.thread.is_alive():
                logger.warning(f"{self.channel.name} thread did not stop within {self.join_timeout}s")
        if exc_type is None and self._error is not None:
            raise self._error

    def result(self) -> Any:
        if self._error is not None:
            raise self._error
        return self._result
