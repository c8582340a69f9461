import { startApp } from "./app.js";

document.addEventListener("DOMContentLoaded", () => {
  startApp();
});
