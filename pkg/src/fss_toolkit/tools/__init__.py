"""MCP tool modules for FSS Toolkit."""
