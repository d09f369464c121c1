"""Bass-Serre MCP server: the command-line deciders exposed as MCP tools."""

import asyncio
import json
from typing import Any, Dict, List, Optional, Sequence

import structlog
from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent, Tool
from pydantic import ValidationError

from .cli import EXIT_ERROR, run
from .config import Settings
from .types import (
    DocumentRequest,
    DoubleRequest,
    ToolResponse,
    TrajetRequest,
    WordPairRequest,
    WordRequest,
)

logger = structlog.get_logger(__name__)

_DOCUMENT = {
    "type": "string",
    "description": "GOG document text (vertex, edge, order and element declarations)",
}


def _schema(properties: Optional[Dict[str, Any]] = None, required: Sequence[str] = ()) -> Dict[str, Any]:
    return {
        "type": "object",
        "properties": {"document": _DOCUMENT, **(properties or {})},
        "required": ["document", *required],
    }


def _word(description: str) -> Dict[str, str]:
    return {"type": "string", "description": description}


_PAIR = _schema(
    {
        "first": _word("First word literal"),
        "second": _word("Second word literal"),
        "depth": {
            "type": "integer",
            "description": "Ball radius for edge-group conjugator searches",
            "minimum": 0,
            "maximum": 64,
        },
    },
    ["first", "second"],
)


class BassSerreMCPServer:
    """MCP server over the graph-of-groups deciders."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()
        self.server = Server(self.settings.mcp_server_name)
        self._setup_tools()

    def tools(self) -> List[Tool]:
        return [
            Tool(
                name="validate_gog",
                description="Parse and validate a graph-of-groups document; lists violations.",
                inputSchema=_schema(),
            ),
            Tool(
                name="present",
                description="Canonical presentation of the fundamental group: generators and relations.",
                inputSchema=_schema(),
            ),
            Tool(
                name="normal_form",
                description="Reduced form of a word and its successive cyclic reduction.",
                inputSchema=_schema({"word": _word("Word literal, e.g. 'a t1 a^-1'")}, ["word"]),
            ),
            Tool(
                name="conjugacy",
                description="Decide whether two words are conjugate; YES carries a conjugator h with first = h second h^-1.",
                inputSchema=_PAIR,
            ),
            Tool(
                name="commute",
                description="Classify a commuting pair of words by the commutation theorems.",
                inputSchema=_PAIR,
            ),
            Tool(
                name="center",
                description="Generators of the center of the fundamental group.",
                inputSchema=_schema(),
            ),
            Tool(
                name="centralizer",
                description="Generators of the centralizer of a word.",
                inputSchema=_schema({"word": _word("Word literal")}, ["word"]),
            ),
            Tool(
                name="trajet",
                description="Search a trajet between two vertex elements written word@vertex.",
                inputSchema=_schema(
                    {"source": _word("Start element, word@vertex"), "target": _word("End element, word@vertex")},
                    ["source", "target"],
                ),
            ),
            Tool(
                name="double",
                description="Double a vertex group along subgroups and compare conjugacy in the group and the double.",
                inputSchema=_schema(
                    {
                        "base": _word("Vertex whose group is doubled"),
                        "subgroups": {
                            "type": "array",
                            "items": {"type": "string"},
                            "description": "Subgroups, each a comma-separated list of generator words",
                            "minItems": 1,
                        },
                    },
                    ["base", "subgroups"],
                ),
            ),
            Tool(
                name="sans_circuit",
                description="Decide whether the graph of groups has no nontrivial reduced circuit.",
                inputSchema=_schema(),
            ),
        ]

    def _setup_tools(self) -> None:
        """Setup MCP tools."""

        @self.server.list_tools()
        async def handle_list_tools() -> List[Tool]:
            logger.debug("handle_list_tools called")
            return self.tools()

        @self.server.call_tool()
        async def handle_call_tool(name: str, arguments: Dict[str, Any]) -> List[TextContent]:
            return await self.call_tool(name, arguments)

    async def call_tool(self, name: str, arguments: Dict[str, Any]) -> List[TextContent]:
        """Dispatch one tool call."""
        logger.info("Tool call received", tool=name)
        handlers = {
            "validate_gog": self._handle_validate,
            "present": self._handle_present,
            "normal_form": self._handle_normal_form,
            "conjugacy": self._handle_conjugacy,
            "commute": self._handle_commute,
            "center": self._handle_center,
            "centralizer": self._handle_centralizer,
            "trajet": self._handle_trajet,
            "double": self._handle_double,
            "sans_circuit": self._handle_sans_circuit,
        }
        handler = handlers.get(name)
        if handler is None:
            return [TextContent(
                type="text",
                text=json.dumps({"error": f"Unknown tool: {name}", "code": "UNKNOWN_TOOL"}),
            )]
        try:
            return await handler(arguments)
        except ValidationError as e:
            logger.warning("Tool request validation failed", tool=name, error=str(e))
            response = ToolResponse(
                success=False, command=name, exit_code=EXIT_ERROR, error=f"VALIDATION_ERROR: {e}"
            )
            return [TextContent(type="text", text=response.model_dump_json())]
        except Exception as e:
            logger.error("Tool call failed", tool=name, error=str(e))
            return [TextContent(
                type="text",
                text=json.dumps({"error": f"Tool execution failed: {e}", "code": "TOOL_EXECUTION_ERROR"}),
            )]

    async def _run(
        self, command: str, document: str, args: Sequence[str], settings: Optional[Settings] = None
    ) -> List[TextContent]:
        code, text = await asyncio.to_thread(run, command, document, list(args), settings or self.settings)
        lines = text.splitlines()
        error = lines[0] if code == EXIT_ERROR and lines and lines[0].startswith("ERROR:") else None
        response = ToolResponse(
            success=code != EXIT_ERROR,
            command=command,
            exit_code=code,
            lines=[] if error else lines,
            error=error,
        )
        return [TextContent(type="text", text=response.model_dump_json())]

    async def _handle_validate(self, arguments: Dict[str, Any]) -> List[TextContent]:
        request = DocumentRequest.model_validate(arguments)
        return await self._run("validate", request.document, [])

    async def _handle_present(self, arguments: Dict[str, Any]) -> List[TextContent]:
        request = DocumentRequest.model_validate(arguments)
        return await self._run("present", request.document, [])

    async def _handle_normal_form(self, arguments: Dict[str, Any]) -> List[TextContent]:
        request = WordRequest.model_validate(arguments)
        return await self._run("nf", request.document, [request.word])

    def _with_depth(self, request: WordPairRequest) -> Settings:
        if request.depth is None:
            return self.settings
        return self.settings.model_copy(update={"conjugacy_depth": request.depth})

    async def _handle_conjugacy(self, arguments: Dict[str, Any]) -> List[TextContent]:
        request = WordPairRequest.model_validate(arguments)
        return await self._run(
            "conj", request.document, [request.first, request.second], self._with_depth(request)
        )

    async def _handle_commute(self, arguments: Dict[str, Any]) -> List[TextContent]:
        request = WordPairRequest.model_validate(arguments)
        return await self._run(
            "commute", request.document, [request.first, request.second], self._with_depth(request)
        )

    async def _handle_center(self, arguments: Dict[str, Any]) -> List[TextContent]:
        request = DocumentRequest.model_validate(arguments)
        return await self._run("center", request.document, [])

    async def _handle_centralizer(self, arguments: Dict[str, Any]) -> List[TextContent]:
        request = WordRequest.model_validate(arguments)
        return await self._run("centralizer", request.document, [request.word])

    async def _handle_trajet(self, arguments: Dict[str, Any]) -> List[TextContent]:
        request = TrajetRequest.model_validate(arguments)
        return await self._run("trajet", request.document, [request.source, request.target])

    async def _handle_double(self, arguments: Dict[str, Any]) -> List[TextContent]:
        request = DoubleRequest.model_validate(arguments)
        return await self._run("double", request.document, [request.base, *request.subgroups])

    async def _handle_sans_circuit(self, arguments: Dict[str, Any]) -> List[TextContent]:
        request = DocumentRequest.model_validate(arguments)
        return await self._run("sans-circuit", request.document, [])

    async def run(self) -> None:
        """Run the MCP server over stdio."""
        try:
            logger.info(
                "Starting Bass-Serre MCP Server",
                name=self.settings.mcp_server_name,
                version=self.settings.mcp_server_version,
            )
            async with stdio_server() as (read_stream, write_stream):
                await self.server.run(
                    read_stream,
                    write_stream,
                    self.server.create_initialization_options(),
                )
        except Exception as e:
            logger.error("Server error", error=str(e))
            raise
        finally:
            logger.info("Bass-Serre MCP Server stopped")
