"""Generator package for report files."""
