"""Process settings, exceptions and the tool result cache."""
