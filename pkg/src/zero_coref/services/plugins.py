"""Adapters for resolvers running as external processes.

Each call starts the command, writes one JSON request line to its stdin and
reads one JSON response line from its stdout::

    -> {"v": 1, "op": "resolve", "doc": {...}, "seed": 0}
    <- {"v": 1, "clusters": [[{"sentence": 0, "start": 0, "end": 1}, ...], ...]}

    -> {"v": 1, "op": "identify", "doc": {...}, "seed": 0}
    <- {"v": 1, "gaps": [[0, 2], [1, 0, 4]]}

A gap is ``[sentence, gap_index]`` (part 0) or ``[part, sentence, gap_index]``.
A response may carry ``"error"`` instead of a payload.
"""

import json
import shlex
import subprocess
from collections import defaultdict

from pydantic import ValidationError

from zero_coref.core.config import settings
from zero_coref.core.conll import write_conll
from zero_coref.core.exceptions import PluginProcessError, PluginProtocolError
from zero_coref.core.logging import get_logger
from zero_coref.models.coref import Azp, ClusterSet, Mention
from zero_coref.models.documents import Document
from zero_coref.models.schemas import PluginDocument, PluginRequest, PluginResponse, PluginSentence

logger = get_logger(__name__)


def document_payload(document: Document) -> PluginDocument:
    """Document view sent to resolver processes."""
    return PluginDocument(
        doc_id=document.doc_id,
        conll=write_conll([document], layout="canonical"),
        sentences=[
            PluginSentence(
                part=part,
                index=index,
                words=[row.word for row in sentence.rows],
                pos=[row.pos for row in sentence.rows],
                pro=[row.is_pro for row in sentence.rows],
            )
            for part, index, sentence in document.iter_sentences()
        ],
    )


class SubprocessClient:
    """Runs one request/response exchange with a resolver command."""

    def __init__(self, command: str | list[str], timeout: float | None = None, seed: int = 0):
        """Initialize the client.

        Args:
            command: Command line, as a list or a shell-quoted string
            timeout: Seconds allowed per call (defaults to settings)
            seed: Seed forwarded to the resolver
        """
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = settings.plugin_timeout if timeout is None else timeout
        self.seed = seed

    def call(self, op: str, document: Document) -> PluginResponse:
        """Send a request and parse the response.

        Raises:
            PluginProcessError: If the process cannot start, times out or exits non-zero
            PluginProtocolError: If the response is not a valid message
        """
        request = PluginRequest(
            v=settings.plugin_protocol_version,
            op=op,  # type: ignore[arg-type]
            doc=document_payload(document),
            seed=self.seed,
        )
        logger.debug(f"→ {self.command[0]} {op} {document.doc_id}")
        try:
            result = subprocess.run(
                self.command,
                input=request.model_dump_json() + "\n",
                capture_output=True,
                text=True,
                timeout=self.timeout,
            )
        except subprocess.TimeoutExpired as e:
            raise PluginProcessError(f"{self.command[0]} timed out after {self.timeout}s") from e
        except OSError as e:
            raise PluginProcessError(f"cannot run {self.command[0]}: {e}") from e

        if result.returncode != 0:
            raise PluginProcessError(
                f"{self.command[0]} exited with {result.returncode}: {result.stderr.strip()[:200]}"
            )
        lines = [line for line in result.stdout.splitlines() if line.strip()]
        if not lines:
            raise PluginProtocolError(f"{self.command[0]} returned no response")
        try:
            response = PluginResponse.model_validate(json.loads(lines[0]))
        except (json.JSONDecodeError, ValidationError) as e:
            raise PluginProtocolError(f"{self.command[0]} sent an invalid response: {e}") from e
        if response.v != settings.plugin_protocol_version:
            raise PluginProtocolError(f"unsupported protocol version {response.v}")
        if response.error:
            raise PluginProcessError(f"{self.command[0]} reported: {response.error}")
        return response


class SubprocessCorefResolver:
    """Coreference resolver backed by an external command."""

    concurrent_safe = True

    def __init__(self, command: str | list[str], timeout: float | None = None, seed: int = 0):
        self.client = SubprocessClient(command, timeout, seed)

    def resolve(self, document: Document) -> ClusterSet:
        response = self.client.call("resolve", document)
        if response.clusters is None:
            raise PluginProtocolError("resolve response carries no 'clusters'")
        groups: dict[int, list[Mention | Azp]] = defaultdict(list)
        for cluster_id, members in enumerate(response.clusters):
            groups[cluster_id].extend(members)
        try:
            return ClusterSet.from_groups(groups)
        except ValueError as e:
            raise PluginProtocolError(f"clusters are not a partition: {e}") from e


class SubprocessAzpIdentifier:
    """AZP identifier backed by an external command."""

    concurrent_safe = True

    def __init__(self, command: str | list[str], timeout: float | None = None, seed: int = 0):
        self.client = SubprocessClient(command, timeout, seed)

    def identify(self, document: Document) -> list[Azp]:
        response = self.client.call("identify", document)
        if response.gaps is None:
            raise PluginProtocolError("identify response carries no 'gaps'")
        azps = []
        for gap in response.gaps:
            part, sentence, gap_index = gap if len(gap) == 3 else (0, *gap)
            azps.append(Azp(part=part, sentence=sentence, gap_index=gap_index))
        return azps
