import { initUi } from "./game.js";

// Served by the same process that hosts /api/game, so the base URL is relative.
document.addEventListener("DOMContentLoaded", () => {
  initUi(document, "");
});
